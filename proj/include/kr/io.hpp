#pragma once

/**
 * @file io.hpp
 * @brief System files and JSON encodings.
 *
 * System file (UTF-8 JSON, 0-based indices, rationals as "a/b" strings):
 *
 *     {"size": 4, "weights": ["1/4", ...], "blocks": [[0,3],[1,2]], "tau": [3,2,1,0]}
 *
 * An optional "negative_fixture": true marks files that intentionally fail
 * validation.
 */

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "kr/ceps.hpp"
#include "kr/certificate.hpp"
#include "kr/lattice.hpp"
#include "kr/periodic_approx.hpp"
#include "kr/recurrence.hpp"
#include "kr/tower.hpp"

namespace kr {

using Json = nlohmann::ordered_json;

/// Throws ParseError on schema violations; does not validate the CEPS axioms.
RawSystem raw_from_json(const Json& j);
Json to_json(const RawSystem& raw);
Json to_json(const GroundSystem& sys);

/// Reads, parses and validates. ParseError for unreadable or malformed
/// files, InvalidSystem for files that fail validation (unless force lets
/// axiom-only failures through).
GroundSystem load_system(const std::filesystem::path& path, bool force = false);
RawSystem load_raw_system(const std::filesystem::path& path);
void save_system(const std::filesystem::path& path, const RawSystem& raw, bool negative_fixture = false);

/// "0,4,5" -> {0,4,5}; empty text -> {}.
std::vector<std::size_t> parse_index_list(std::string_view text);

/// FNV-1a over the canonical system JSON, as 16 hex digits.
std::string system_digest(const GroundSystem& sys);

Json to_json(const Component& c);
Json to_json(const LatticeElement& f);
Json to_json(const Certificate& c);
Json to_json(const ValidationReport& r);
Json to_json(const ReturnDecomposition& d);
Json to_json(const Tower& t);
Json to_json(const PeriodicApproximation& a);

LatticeElement element_from_json(const Json& j);

/// Minimal CSV writer (header + rows, values already formatted).
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace kr
