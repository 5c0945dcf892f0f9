#include "kr/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kr/errors.hpp"

namespace kr {

namespace {

std::int64_t as_index(const Json& v, const char* what) {
    if (!v.is_number_integer()) throw ParseError(std::string(what) + ": expected an integer, got " + v.dump());
    return v.get<std::int64_t>();
}

Rational as_rational(const Json& v) {
    if (v.is_string()) return Rational::parse(v.get<std::string>());
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    throw ParseError("expected a rational string, got " + v.dump());
}

}  // namespace

RawSystem raw_from_json(const Json& j) {
    if (!j.is_object()) throw ParseError("system file must hold a JSON object");
    for (const char* key : {"size", "weights", "blocks", "tau"}) {
        if (!j.contains(key)) throw ParseError(std::string("system file is missing \"") + key + "\"");
    }
    RawSystem r;
    r.size = as_index(j["size"], "size");
    if (!j["weights"].is_array()) throw ParseError("\"weights\" must be an array");
    for (const auto& w : j["weights"]) r.weights.push_back(as_rational(w));
    if (!j["blocks"].is_array()) throw ParseError("\"blocks\" must be an array of arrays");
    for (const auto& b : j["blocks"]) {
        if (!b.is_array()) throw ParseError("\"blocks\" must be an array of arrays");
        std::vector<std::int64_t> block;
        for (const auto& i : b) block.push_back(as_index(i, "blocks"));
        r.blocks.push_back(std::move(block));
    }
    if (!j["tau"].is_array()) throw ParseError("\"tau\" must be an array");
    for (const auto& t : j["tau"]) r.tau.push_back(as_index(t, "tau"));
    return r;
}

Json to_json(const RawSystem& raw) {
    Json j;
    j["size"] = raw.size;
    j["weights"] = Json::array();
    for (const auto& w : raw.weights) j["weights"].push_back(w.str());
    j["blocks"] = raw.blocks;
    j["tau"] = raw.tau;
    return j;
}

Json to_json(const GroundSystem& sys) { return to_json(sys.raw()); }

RawSystem load_raw_system(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read system file " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError("malformed JSON in " + path.string() + ": " + ex.what());
    }
    return raw_from_json(j);
}

GroundSystem load_system(const std::filesystem::path& path, bool force) {
    return GroundSystem(load_raw_system(path), force);
}

void save_system(const std::filesystem::path& path, const RawSystem& raw, bool negative_fixture) {
    Json j = to_json(raw);
    if (negative_fixture) j["negative_fixture"] = true;
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

std::vector<std::size_t> parse_index_list(std::string_view text) {
    std::vector<std::size_t> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        std::string_view item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
        if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
            throw ParseError("bad index list entry '" + std::string(item) + "'");
        }
        out.push_back(value);
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
        if (text.empty()) throw ParseError("trailing comma in index list");
    }
    return out;
}

std::string system_digest(const GroundSystem& sys) {
    const std::string canonical = to_json(sys).dump();
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

Json to_json(const Component& c) { return c.members(); }

Json to_json(const LatticeElement& f) {
    Json j = Json::array();
    for (const auto& x : f.values()) j.push_back(x.str());
    return j;
}

LatticeElement element_from_json(const Json& j) {
    if (!j.is_array()) throw ParseError("lattice element must be an array");
    std::vector<Rational> v;
    for (const auto& x : j) v.push_back(as_rational(x));
    return LatticeElement(std::move(v));
}

Json to_json(const Certificate& c) {
    Json j;
    j["name"] = c.name;
    j["lhs"] = to_json(c.lhs);
    j["relation"] = relation_symbol(c.relation);
    j["rhs"] = to_json(c.rhs);
    j["holds"] = c.holds;
    return j;
}

Json to_json(const ValidationReport& r) {
    Json j;
    j["valid"] = r.ok();
    j["checks"] = Json::array();
    for (const auto& c : r.checks) {
        Json item;
        item["name"] = c.name;
        item["pass"] = c.passed;
        if (!c.passed) item["witness"] = c.witness;
        j["checks"].push_back(std::move(item));
    }
    return j;
}

Json to_json(const ReturnDecomposition& d) {
    Json j;
    j["p"] = to_json(d.base);
    j["parts"] = Json::object();
    for (const auto& [k, part] : d.parts) j["parts"][std::to_string(k)] = to_json(part);
    j["horizon"] = d.horizon;
    return j;
}

Json to_json(const Tower& t) {
    Json j;
    j["p"] = to_json(t.source);
    j["height"] = t.height;
    if (t.horizon > 0) j["horizon_N"] = t.horizon;
    j["base"] = to_json(t.base);
    j["levels"] = Json::array();
    for (const auto& level : t.levels) j["levels"].push_back(to_json(level));
    j["scope"] = to_json(t.scope);
    j["residual"] = to_json(t.residual);
    j["certificate"] = to_json(t.bound);
    j["auxiliary"] = Json::array();
    for (const auto& a : t.auxiliary) j["auxiliary"].push_back(to_json(a));
    j["warnings"] = t.warnings;
    j["pass"] = t.holds();
    return j;
}

Json to_json(const PeriodicApproximation& a) {
    Json j;
    j["tau_prime"] = a.tau_prime;
    j["n"] = a.period_bound;
    j["p"] = to_json(a.p);
    j["h"] = to_json(a.h);
    j["q"] = to_json(a.q);
    j["eps"] = a.eps.str();
    Json hist = Json::object();
    for (const auto& [len, count] : a.cycle_histogram()) hist[std::to_string(len)] = count;
    j["cycle_length_histogram"] = hist;
    j["max_cycle_length"] = a.max_cycle_length();
    j["certificate_mode"] = a.certificate_mode;
    j["components_checked"] = a.components_checked;
    j["worst_distance"] = to_json(a.worst_distance);
    j["majorant"] = to_json(a.majorant);
    j["auxiliary"] = Json::array();
    for (const auto& c : a.auxiliary) j["auxiliary"].push_back(to_json(c));
    j["pass"] = a.holds();
    return j;
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
}

}  // namespace kr
