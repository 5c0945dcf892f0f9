#include "kr/ceps.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "kr/errors.hpp"

namespace kr {

namespace {

constexpr const char* kNotEvaluated = "not evaluated: prerequisite check failed";

std::string list_str(const std::vector<std::int64_t>& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(xs[i]);
    }
    return s + "]";
}

/// Weighted block averages from raw data; assumes a partition with positive weights.
std::vector<Rational> raw_block_average(const std::vector<Rational>& weights,
                                        const std::vector<std::vector<std::int64_t>>& blocks,
                                        const std::vector<Rational>& f) {
    std::vector<Rational> out(f.size());
    for (const auto& block : blocks) {
        Rational mass(0);
        Rational total(0);
        for (auto i : block) {
            mass += weights[static_cast<std::size_t>(i)];
            total += weights[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
        }
        const Rational avg = total / mass;
        for (auto i : block) out[static_cast<std::size_t>(i)] = avg;
    }
    return out;
}

}  // namespace

// -------------------------------------------------------------- validation

bool ValidationReport::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

bool ValidationReport::only_axiom_failures() const {
    static const std::set<std::string> overridable = {"blocks.tau_invariant", "weights.tau_invariant",
                                                      "TS=T.extensional", "T.unit", "S.unit"};
    for (const auto& c : checks) {
        if (!c.passed && !overridable.contains(c.name)) return false;
    }
    return true;
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string ValidationReport::summary() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& c : checks) {
        if (c.passed) continue;
        if (!first) os << "; ";
        os << c.name << " (" << c.witness << ")";
        first = false;
    }
    return first ? "all checks pass" : os.str();
}

ValidationReport validate_ceps(const RawSystem& raw) {
    ValidationReport report;
    auto add = [&](std::string name, bool passed, std::string witness = {}) {
        report.checks.push_back({std::move(name), passed, passed ? std::string{} : std::move(witness)});
    };

    const bool size_ok = raw.size >= 1;
    add("size", size_ok, "size " + std::to_string(raw.size) + " < 1");
    const auto n = static_cast<std::size_t>(std::max<std::int64_t>(raw.size, 0));

    const bool weight_count_ok = raw.weights.size() == n;
    add("weights.count", weight_count_ok,
        std::to_string(raw.weights.size()) + " weights for " + std::to_string(n) + " points");

    std::string bad_weight;
    for (std::size_t i = 0; i < raw.weights.size(); ++i) {
        if (raw.weights[i].sign() <= 0) {
            bad_weight = "index " + std::to_string(i) + " has weight " + raw.weights[i].str();
            break;
        }
    }
    const bool weights_positive = bad_weight.empty();
    add("weights.positive", weights_positive, bad_weight);

    // tau must be a bijection of {0..N-1}
    std::string bad_tau;
    if (raw.tau.size() != n) {
        bad_tau = "tau has " + std::to_string(raw.tau.size()) + " entries for " + std::to_string(n) + " points";
    } else {
        std::vector<bool> hit(n, false);
        for (std::size_t i = 0; i < n && bad_tau.empty(); ++i) {
            const auto t = raw.tau[i];
            if (t < 0 || static_cast<std::size_t>(t) >= n) {
                bad_tau = "tau(" + std::to_string(i) + ") = " + std::to_string(t) + " out of range";
            } else if (hit[static_cast<std::size_t>(t)]) {
                bad_tau = "index " + std::to_string(t) + " is hit twice (at " + std::to_string(i) + ")";
            } else {
                hit[static_cast<std::size_t>(t)] = true;
            }
        }
    }
    const bool tau_ok = bad_tau.empty();
    add("tau.permutation", tau_ok, bad_tau);

    std::string bad_blocks;
    {
        std::vector<bool> seen(n, false);
        for (std::size_t b = 0; b < raw.blocks.size() && bad_blocks.empty(); ++b) {
            if (raw.blocks[b].empty()) bad_blocks = "block " + std::to_string(b) + " is empty";
            for (auto i : raw.blocks[b]) {
                if (i < 0 || static_cast<std::size_t>(i) >= n) {
                    bad_blocks = "block " + std::to_string(b) + " has index " + std::to_string(i) + " out of range";
                    break;
                }
                if (seen[static_cast<std::size_t>(i)]) {
                    bad_blocks = "index " + std::to_string(i) + " appears in two blocks";
                    break;
                }
                seen[static_cast<std::size_t>(i)] = true;
            }
        }
        if (bad_blocks.empty()) {
            for (std::size_t i = 0; i < n; ++i) {
                if (!seen[i]) {
                    bad_blocks = "index " + std::to_string(i) + " is in no block";
                    break;
                }
            }
        }
    }
    const bool blocks_ok = bad_blocks.empty() && size_ok;
    add("blocks.partition", blocks_ok, bad_blocks.empty() ? "empty ground set" : bad_blocks);

    const bool structure_ok = size_ok && weight_count_ok && weights_positive && tau_ok && blocks_ok;

    // Structural form of TS = T: tau(B) = B and mu o tau = mu.
    bool blocks_invariant = false;
    bool weights_invariant = false;
    if (structure_ok) {
        std::vector<std::size_t> block_of(n);
        for (std::size_t b = 0; b < raw.blocks.size(); ++b) {
            for (auto i : raw.blocks[b]) block_of[static_cast<std::size_t>(i)] = b;
        }
        std::string witness;
        for (std::size_t b = 0; b < raw.blocks.size() && witness.empty(); ++b) {
            for (auto i : raw.blocks[b]) {
                const auto t = static_cast<std::size_t>(raw.tau[static_cast<std::size_t>(i)]);
                if (block_of[t] != b) {
                    witness = "block " + std::to_string(b) + " " + list_str(raw.blocks[b]) + " maps " +
                              std::to_string(i) + " outside itself to " + std::to_string(t);
                    break;
                }
            }
        }
        blocks_invariant = witness.empty();
        add("blocks.tau_invariant", blocks_invariant, witness);

        witness.clear();
        for (std::size_t i = 0; i < n; ++i) {
            const auto t = static_cast<std::size_t>(raw.tau[i]);
            if (raw.weights[t] != raw.weights[i]) {
                witness = "index " + std::to_string(i) + ": weight " + raw.weights[i].str() + " but tau(" +
                          std::to_string(i) + ") = " + std::to_string(t) + " has " + raw.weights[t].str();
                break;
            }
        }
        weights_invariant = witness.empty();
        add("weights.tau_invariant", weights_invariant, witness);
    } else {
        add("blocks.tau_invariant", false, kNotEvaluated);
        add("weights.tau_invariant", false, kNotEvaluated);
    }

    if (structure_ok) {
        const std::vector<Rational> ones(n, Rational(1));
        const auto te = raw_block_average(raw.weights, raw.blocks, ones);
        add("T.unit", te == ones, "Te != e");

        // S e = e holds for any map tau; checked on the formula for completeness.
        std::vector<Rational> se(n);
        for (std::size_t i = 0; i < n; ++i) se[i] = ones[static_cast<std::size_t>(raw.tau[i])];
        add("S.unit", se == ones, "Se != e");
        add("S.surjective_homomorphism", true);

        // Extensional TS = T on the N coordinate indicators.
        std::string witness;
        for (std::size_t k = 0; k < n && witness.empty(); ++k) {
            std::vector<Rational> chi(n, Rational(0));
            chi[k] = Rational(1);
            std::vector<Rational> s_chi(n);
            for (std::size_t i = 0; i < n; ++i) s_chi[i] = chi[static_cast<std::size_t>(raw.tau[i])];
            if (raw_block_average(raw.weights, raw.blocks, s_chi) != raw_block_average(raw.weights, raw.blocks, chi)) {
                witness = "T S chi_{" + std::to_string(k) + "} != T chi_{" + std::to_string(k) + "}";
            }
        }
        const bool extensional = witness.empty();
        add("TS=T.extensional", extensional, witness);
        add("TS=T.agreement", extensional == (blocks_invariant && weights_invariant),
            "structural and extensional TS = T checks disagree");
    } else {
        add("T.unit", false, kNotEvaluated);
        add("S.unit", false, kNotEvaluated);
        add("S.surjective_homomorphism", false, tau_ok ? kNotEvaluated : "tau is not a bijection");
        add("TS=T.extensional", false, kNotEvaluated);
        add("TS=T.agreement", false, kNotEvaluated);
    }
    return report;
}

// ------------------------------------------------------------ GroundSystem

GroundSystem::GroundSystem(const RawSystem& raw, bool allow_axiom_failures) : validation_(validate_ceps(raw)) {
    if (!validation_.ok() && !(allow_axiom_failures && validation_.only_axiom_failures())) {
        throw InvalidSystem("invalid system: " + validation_.summary());
    }
    size_ = static_cast<std::size_t>(raw.size);
    weights_ = raw.weights;
    tau_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) tau_[i] = static_cast<std::size_t>(raw.tau[i]);

    for (const auto& block : raw.blocks) {
        std::vector<std::size_t> b;
        for (auto i : block) b.push_back(static_cast<std::size_t>(i));
        std::sort(b.begin(), b.end());
        blocks_.push_back(std::move(b));
    }
    std::sort(blocks_.begin(), blocks_.end());
    block_of_.resize(size_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
        for (auto i : blocks_[b]) block_of_[i] = b;
    }

    cycle_of_.assign(size_, size_);
    cycle_pos_.assign(size_, 0);
    for (std::size_t start = 0; start < size_; ++start) {
        if (cycle_of_[start] != size_) continue;
        std::vector<std::size_t> cycle;
        for (std::size_t x = start; cycle_of_[x] == size_; x = tau_[x]) {
            cycle_of_[x] = cycles_.size();
            cycle_pos_[x] = cycle.size();
            cycle.push_back(x);
        }
        cycles_.push_back(std::move(cycle));
    }
}

std::size_t GroundSystem::image(std::size_t i, std::int64_t j) const {
    const auto& cycle = cycles_[cycle_of_[i]];
    const auto len = static_cast<std::int64_t>(cycle.size());
    const auto pos = ((static_cast<std::int64_t>(cycle_pos_[i]) + j) % len + len) % len;
    return cycle[static_cast<std::size_t>(pos)];
}

std::uint64_t GroundSystem::cycle_lcm() const { return cycle_lcm(omega()); }

std::uint64_t GroundSystem::cycle_lcm(const Component& within) const {
    std::uint64_t l = 1;
    for (const auto& cycle : cycles_) {
        if (std::any_of(cycle.begin(), cycle.end(), [&](std::size_t x) { return within.contains(x); })) {
            l = std::lcm(l, static_cast<std::uint64_t>(cycle.size()));
        }
    }
    return l;
}

std::size_t GroundSystem::max_cycle_length(const Component& p) const {
    std::size_t m = 0;
    for (std::size_t x : p.members()) m = std::max(m, cycle_length_of(x));
    return m;
}

RawSystem GroundSystem::raw() const {
    RawSystem r;
    r.size = static_cast<std::int64_t>(size_);
    r.weights = weights_;
    for (const auto& b : blocks_) r.blocks.emplace_back(b.begin(), b.end());
    r.tau.assign(tau_.begin(), tau_.end());
    return r;
}

Component GroundSystem::block_component(std::size_t b) const { return Component::of(size_, blocks_.at(b)); }

Component GroundSystem::cycle_component(std::size_t c) const { return Component::of(size_, cycles_.at(c)); }

// -------------------------------------------------------------- operators

LatticeElement cond_expectation(const GroundSystem& sys, const LatticeElement& f) {
    if (f.size() != sys.size()) throw DimensionError("cond_expectation: element length differs from ground set");
    std::vector<Rational> out(sys.size());
    for (const auto& block : sys.blocks()) {
        Rational mass(0);
        Rational total(0);
        for (auto i : block) {
            mass += sys.weights()[i];
            total += sys.weights()[i] * f[i];
        }
        const Rational avg = total / mass;
        for (auto i : block) out[i] = avg;
    }
    return LatticeElement(std::move(out));
}

LatticeElement koopman(const GroundSystem& sys, std::int64_t j, const LatticeElement& f) {
    if (f.size() != sys.size()) throw DimensionError("koopman: element length differs from ground set");
    std::vector<Rational> out;
    out.reserve(sys.size());
    for (std::size_t i = 0; i < sys.size(); ++i) out.push_back(f[sys.image(i, j)]);
    return LatticeElement(std::move(out));
}

Component component_image(const GroundSystem& sys, std::int64_t j, const Component& p) {
    if (p.size() != sys.size()) throw DimensionError("component_image: component on a different ground set");
    std::vector<std::size_t> out;
    for (std::size_t y : p.members()) out.push_back(sys.image(y, -j));
    return Component::of(sys.size(), out);
}

LatticeElement cesaro_mean(const GroundSystem& sys, const LatticeElement& f) {
    if (f.size() != sys.size()) throw DimensionError("cesaro_mean: element length differs from ground set");
    std::vector<Rational> out(sys.size());
    for (const auto& cycle : sys.cycles()) {
        Rational total(0);
        for (auto x : cycle) total += f[x];
        const Rational avg = total / Rational(static_cast<std::int64_t>(cycle.size()));
        for (auto x : cycle) out[x] = avg;
    }
    return LatticeElement(std::move(out));
}

LatticeElement cesaro_partial_sum(const GroundSystem& sys, const LatticeElement& f, std::uint64_t n) {
    if (f.size() != sys.size()) throw DimensionError("cesaro_partial_sum: element length differs from ground set");
    if (n == 0) throw DomainError("cesaro_partial_sum needs n >= 1");
    std::vector<Rational> out(sys.size(), Rational(0));
    for (std::size_t i = 0; i < sys.size(); ++i) {
        std::size_t x = i;  // tau^k(i)
        for (std::uint64_t k = 0; k < n; ++k) {
            out[i] += f[x];
            x = sys.tau()[x];
        }
        out[i] /= Rational(static_cast<std::int64_t>(n));
    }
    return LatticeElement(std::move(out));
}

std::optional<std::size_t> first_split_block(const GroundSystem& sys) {
    for (std::size_t b = 0; b < sys.blocks().size(); ++b) {
        const auto& block = sys.blocks()[b];
        if (sys.cycle_length_of(block.front()) != block.size()) return b;
    }
    return std::nullopt;
}

bool is_conditionally_ergodic(const GroundSystem& sys) { return !first_split_block(sys).has_value(); }

void require_conditionally_ergodic(const GroundSystem& sys, const std::string& operation) {
    if (auto b = first_split_block(sys)) {
        const auto& block = sys.blocks()[*b];
        std::size_t orbits = 0;
        std::set<std::size_t> seen;
        for (auto x : block) {
            if (seen.insert(sys.cycle_of(x)).second) ++orbits;
        }
        const std::string where = "block " + std::to_string(*b) + " " + Component::of(sys.size(), block).str();
        bool inside = true;
        for (auto x : block) inside = inside && std::find(block.begin(), block.end(), sys.tau()[x]) != block.end();
        if (!inside) {
            throw NotErgodic(operation + " needs a conditionally ergodic system: " + where +
                             " is not tau-invariant");
        }
        throw NotErgodic(operation + " needs a conditionally ergodic system: " + where + " splits into " +
                         std::to_string(orbits) + " tau-orbits");
    }
}

GroundSystem orbit_refinement(const GroundSystem& sys) {
    RawSystem r = sys.raw();
    r.blocks.clear();
    for (const auto& cycle : sys.cycles()) r.blocks.emplace_back(cycle.begin(), cycle.end());
    return GroundSystem(r);
}

Component Restriction::lift(const Component& local, std::size_t parent_size) const {
    std::vector<std::size_t> out;
    for (auto i : local.members()) out.push_back(to_parent.at(i));
    return Component::of(parent_size, out);
}

Restriction restrict_to(const GroundSystem& sys, const Component& v) {
    if (v.size() != sys.size()) throw DimensionError("restrict_to: component on a different ground set");
    if (v.empty()) throw DomainError("restrict_to: empty component");
    if (component_image(sys, 1, v) != v) throw DomainError("restrict_to: " + v.str() + " is not a union of tau-orbits");

    const auto members = v.members();
    std::vector<std::int64_t> to_local(sys.size(), -1);
    for (std::size_t k = 0; k < members.size(); ++k) to_local[members[k]] = static_cast<std::int64_t>(k);

    RawSystem r;
    r.size = static_cast<std::int64_t>(members.size());
    for (auto x : members) {
        r.weights.push_back(sys.weights()[x]);
        r.tau.push_back(to_local[sys.tau()[x]]);
    }
    for (const auto& block : sys.blocks()) {
        std::vector<std::int64_t> b;
        for (auto x : block) {
            if (to_local[x] >= 0) b.push_back(to_local[x]);
        }
        if (!b.empty()) r.blocks.push_back(std::move(b));
    }
    return Restriction{GroundSystem(r), members};
}

}  // namespace kr
