#pragma once

/**
 * @file ceps.hpp
 * @brief Conditional expectation preserving systems on a finite ground set.
 *
 * A GroundSystem is (Omega, mu, Pi, tau):
 *   - T  is the mu-weighted average over the block of Pi containing a point,
 *   - S  is the Koopman operator (S^j f)(i) = f(tau^j(i)),
 *   - e  is the constant 1.
 *
 * On components S^j acts as the set map tau^{-j}. Every S-power in the
 * toolkit goes through koopman() or component_image(); nothing else applies
 * tau to sets directly.
 */

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kr/lattice.hpp"
#include "kr/rational.hpp"

namespace kr {

/// Unvalidated system description, as read from a file.
struct RawSystem {
    std::int64_t size = 0;
    std::vector<Rational> weights;
    std::vector<std::vector<std::int64_t>> blocks;
    std::vector<std::int64_t> tau;
};

struct ValidationCheck {
    std::string name;
    bool passed = false;
    /// Index, block or reason exhibiting the violation; empty on success.
    std::string witness;
};

/// Itemized result of validate_ceps. The system is valid iff every check passes.
struct ValidationReport {
    std::vector<ValidationCheck> checks;

    bool ok() const;
    /// True iff every failing check is one --force may override
    /// (tau-invariance of blocks and weights, TS = T).
    bool only_axiom_failures() const;
    const ValidationCheck* find(const std::string& name) const;
    std::string summary() const;
};

/// Never throws: malformed input shows up as failed checks.
ValidationReport validate_ceps(const RawSystem& candidate);

class GroundSystem {
public:
    /// Validates; throws InvalidSystem unless every check passes. With
    /// allow_axiom_failures, systems whose only defects are failed CEPS
    /// axioms are accepted (counterexample demos).
    explicit GroundSystem(const RawSystem& raw, bool allow_axiom_failures = false);

    std::size_t size() const { return size_; }
    const std::vector<Rational>& weights() const { return weights_; }
    /// Blocks sorted internally and by smallest member.
    const std::vector<std::vector<std::size_t>>& blocks() const { return blocks_; }
    std::size_t block_of(std::size_t i) const { return block_of_[i]; }
    const std::vector<std::size_t>& tau() const { return tau_; }

    /// tau-cycles in orbit order x, tau(x), tau^2(x), ... starting at their
    /// smallest member; sorted by that member.
    const std::vector<std::vector<std::size_t>>& cycles() const { return cycles_; }
    std::size_t cycle_of(std::size_t i) const { return cycle_of_[i]; }
    std::size_t cycle_length_of(std::size_t i) const { return cycles_[cycle_of_[i]].size(); }

    /// tau^j(i) for any integer j.
    std::size_t image(std::size_t i, std::int64_t j) const;

    /// lcm of the lengths of cycles meeting `within` (all cycles if omitted).
    std::uint64_t cycle_lcm() const;
    std::uint64_t cycle_lcm(const Component& within) const;
    /// Longest cycle meeting p; 0 for p empty.
    std::size_t max_cycle_length(const Component& p) const;

    const ValidationReport& validation() const { return validation_; }
    RawSystem raw() const;

    Component omega() const { return Component::full(size_); }
    LatticeElement unit() const { return LatticeElement::unit(size_); }
    Component block_component(std::size_t b) const;
    Component cycle_component(std::size_t c) const;

    friend bool operator==(const GroundSystem& a, const GroundSystem& b) {
        return a.size_ == b.size_ && a.weights_ == b.weights_ && a.blocks_ == b.blocks_ && a.tau_ == b.tau_;
    }

private:
    std::size_t size_ = 0;
    std::vector<Rational> weights_;
    std::vector<std::vector<std::size_t>> blocks_;
    std::vector<std::size_t> block_of_;
    std::vector<std::size_t> tau_;
    std::vector<std::vector<std::size_t>> cycles_;
    std::vector<std::size_t> cycle_of_;
    std::vector<std::size_t> cycle_pos_;
    ValidationReport validation_;
};

/// T f: weighted block average.
LatticeElement cond_expectation(const GroundSystem& sys, const LatticeElement& f);

/// S^j f, (S^j f)[i] = f[tau^j(i)].
LatticeElement koopman(const GroundSystem& sys, std::int64_t j, const LatticeElement& f);

/// S^j applied to a component: the set tau^{-j}(p).
Component component_image(const GroundSystem& sys, std::int64_t j, const Component& p);

/// L_S f: the exact limit of the Cesaro means, i.e. the average of f over
/// the tau-orbit of each point.
LatticeElement cesaro_mean(const GroundSystem& sys, const LatticeElement& f);

/// (1/n) sum_{k<n} S^k f, computed by iterating S. Requires n >= 1.
LatticeElement cesaro_partial_sum(const GroundSystem& sys, const LatticeElement& f, std::uint64_t n);

/// True iff every block is a single tau-orbit.
bool is_conditionally_ergodic(const GroundSystem& sys);

/// Index of the first block that splits into several orbits, if any.
std::optional<std::size_t> first_split_block(const GroundSystem& sys);

/// Throws NotErgodic naming a splitting block.
void require_conditionally_ergodic(const GroundSystem& sys, const std::string& operation);

/// Same (Omega, mu, tau) with the blocks replaced by the tau-orbits.
GroundSystem orbit_refinement(const GroundSystem& sys);

/// Restriction to a union of tau-orbits v, relabelled 0..|v|-1 in increasing
/// order of the original index. Blocks are intersected with v.
struct Restriction {
    GroundSystem system;
    /// local index -> original index
    std::vector<std::size_t> to_parent;

    Component lift(const Component& local, std::size_t parent_size) const;
};
Restriction restrict_to(const GroundSystem& sys, const Component& v);

}  // namespace kr
