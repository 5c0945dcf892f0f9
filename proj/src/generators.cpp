#include "kr/generators.hpp"

#include <limits>

#include "kr/errors.hpp"

namespace kr {

namespace {

void check_range(const IntRange& r, const char* what) {
    if (r.lo < 1 || r.lo > r.hi) {
        throw DomainError(std::string("random_system: bad ") + what + " range [" + std::to_string(r.lo) + ", " +
                          std::to_string(r.hi) + "]");
    }
}

std::vector<std::vector<std::size_t>> draw_layout(const RandomSpec& spec, Rng& rng) {
    check_range(spec.num_blocks, "num_blocks");
    check_range(spec.cycle_lengths, "cycle_lengths");
    if (!spec.ergodic) check_range(spec.cycles_per_block, "cycles_per_block");
    if (spec.weight_denominator_bound < 1) throw DomainError("random_system: weight_denominator_bound < 1");

    std::vector<std::vector<std::size_t>> layout(uniform_int(rng, spec.num_blocks.lo, spec.num_blocks.hi));
    for (auto& block : layout) {
        const auto cycles = spec.ergodic ? 1 : uniform_int(rng, spec.cycles_per_block.lo, spec.cycles_per_block.hi);
        for (std::uint64_t c = 0; c < cycles; ++c) {
            block.push_back(uniform_int(rng, spec.cycle_lengths.lo, spec.cycle_lengths.hi));
        }
    }
    return layout;
}

}  // namespace

std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
    if (lo > hi) throw DomainError("uniform_int: empty range");
    const std::uint64_t span = hi - lo;
    if (span == std::numeric_limits<std::uint64_t>::max()) return rng();
    const std::uint64_t width = span + 1;
    // Reject the top partial bucket so every value is equally likely.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % width;
    std::uint64_t x = rng();
    while (x >= limit) x = rng();
    return lo + x % width;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

GroundSystem single_cycle(std::size_t m, const std::optional<std::vector<Rational>>& weights) {
    if (m < 1) throw DomainError("single_cycle needs m >= 1");
    RawSystem r;
    r.size = static_cast<std::int64_t>(m);
    if (weights) {
        if (weights->size() != m) throw DomainError("single_cycle: expected " + std::to_string(m) + " weights");
        for (const auto& w : *weights) {
            if (w != weights->front()) {
                throw DomainError("single_cycle: weights must be equal along the cycle (mu o tau = mu)");
            }
        }
        r.weights = *weights;
    } else {
        r.weights.assign(m, Rational(1, static_cast<std::int64_t>(m)));
    }
    r.blocks.emplace_back();
    for (std::size_t i = 0; i < m; ++i) {
        r.tau.push_back(static_cast<std::int64_t>((i + 1) % m));
        r.blocks.front().push_back(static_cast<std::int64_t>(i));
    }
    return GroundSystem(r);
}

GroundSystem swap_example() { return single_cycle(2, std::vector<Rational>{Rational(1, 2), Rational(1, 2)}); }

GroundSystem direct_product(const std::vector<GroundSystem>& systems) {
    if (systems.empty()) throw DomainError("direct_product needs at least one factor");
    RawSystem r;
    std::int64_t offset = 0;
    for (const auto& s : systems) {
        const RawSystem part = s.raw();
        r.weights.insert(r.weights.end(), part.weights.begin(), part.weights.end());
        for (auto t : part.tau) r.tau.push_back(t + offset);
        for (const auto& b : part.blocks) {
            std::vector<std::int64_t> shifted;
            for (auto i : b) shifted.push_back(i + offset);
            r.blocks.push_back(std::move(shifted));
        }
        offset += part.size;
    }
    r.size = offset;
    return GroundSystem(r);
}

GroundSystem product_counterexample(std::size_t max_cycle) {
    if (max_cycle < 1) throw DomainError("product_counterexample needs max_cycle >= 1");
    std::vector<GroundSystem> factors;
    for (std::size_t m = 1; m <= max_cycle; ++m) factors.push_back(single_cycle(m));
    return direct_product(factors);
}

std::vector<std::vector<std::size_t>> random_layout(const RandomSpec& spec) {
    Rng rng(spec.seed);
    return draw_layout(spec, rng);
}

GroundSystem random_system(const RandomSpec& spec) {
    Rng rng(spec.seed);
    const auto layout = draw_layout(spec, rng);

    std::size_t size = 0;
    for (const auto& block : layout) {
        for (auto len : block) size += len;
    }

    // Random relabelling so cycles are not contiguous runs of indices.
    std::vector<std::size_t> label(size);
    for (std::size_t i = 0; i < size; ++i) label[i] = i;
    for (std::size_t i = size; i > 1; --i) std::swap(label[i - 1], label[uniform_int(rng, 0, i - 1)]);

    RawSystem r;
    r.size = static_cast<std::int64_t>(size);
    r.weights.assign(size, Rational(1));
    r.tau.assign(size, 0);
    std::size_t next = 0;
    for (const auto& block : layout) {
        std::vector<std::int64_t> members;
        for (auto len : block) {
            const auto den = static_cast<std::int64_t>(uniform_int(rng, 1, spec.weight_denominator_bound));
            const auto num = static_cast<std::int64_t>(uniform_int(rng, 1, spec.weight_denominator_bound));
            const Rational w(num, den);
            for (std::size_t k = 0; k < len; ++k) {
                const std::size_t x = label[next + k];
                r.tau[x] = static_cast<std::int64_t>(label[next + (k + 1) % len]);
                r.weights[x] = w;
                members.push_back(static_cast<std::int64_t>(x));
            }
            next += len;
        }
        r.blocks.push_back(std::move(members));
    }
    return GroundSystem(r);
}

Component random_component(Rng& rng, std::size_t size, bool nonempty) {
    while (true) {
        std::vector<std::size_t> members;
        std::uint64_t bits = 0;
        for (std::size_t i = 0; i < size; ++i) {
            if (i % 64 == 0) bits = rng();
            if ((bits >> (i % 64)) & 1U) members.push_back(i);
        }
        if (!nonempty || !members.empty() || size == 0) return Component::of(size, members);
    }
}

Component random_subset(Rng& rng, const Component& within) {
    std::vector<std::size_t> members;
    for (auto x : within.members()) {
        if (rng() & 1U) members.push_back(x);
    }
    return Component::of(within.size(), members);
}

}  // namespace kr
