#pragma once

/**
 * @file generators.hpp
 * @brief Fixture and random system builders.
 *
 * Random generation is a pure function of the seed. The draws use
 * std::mt19937_64 with hand-written bounded sampling, so a seed means the
 * same system on every standard library.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "kr/ceps.hpp"

namespace kr {

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi].
std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi);

/// tau(i) = i+1 mod m, one block. weights, if given, must all be equal;
/// the default is 1/m each.
GroundSystem single_cycle(std::size_t m, const std::optional<std::vector<Rational>>& weights = std::nullopt);

/// Omega = {0,1}, tau = swap, one block, weights (1/2, 1/2).
GroundSystem swap_example();

/// Disjoint union; the i-th factor is shifted by the sizes of the earlier ones.
GroundSystem direct_product(const std::vector<GroundSystem>& systems);

/// Product of single_cycle(m) for m = 1..max_cycle: conditionally ergodic,
/// but with cycles of every length up to max_cycle.
GroundSystem product_counterexample(std::size_t max_cycle);

struct IntRange {
    std::size_t lo = 1;
    std::size_t hi = 1;
};

struct RandomSpec {
    std::uint64_t seed = 0;
    IntRange num_blocks{1, 4};
    IntRange cycle_lengths{1, 8};
    /// Cycles grouped into one block when !ergodic.
    IntRange cycles_per_block{2, 3};
    std::uint64_t weight_denominator_bound = 6;
    bool ergodic = true;
};

/// Cycle lengths drawn for spec, block by block (replays random_system).
std::vector<std::vector<std::size_t>> random_layout(const RandomSpec& spec);

/// Always passes validate_ceps. Throws DomainError for impossible specs.
GroundSystem random_system(const RandomSpec& spec);

/// Each point independently with probability 1/2; redrawn until nonempty
/// when nonempty is set.
Component random_component(Rng& rng, std::size_t size, bool nonempty);

/// Uniform subset of `within` (may be empty).
Component random_subset(Rng& rng, const Component& within);

/// splitmix64; derives independent per-trial seeds from a base seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace kr
