#pragma once

/**
 * @file tower.hpp
 * @brief Kakutani-Rokhlin towers.
 *
 * build_tower is the epsilon-free construction
 *
 *     q = V_{j>=0} S^{nj} R_{n(j+1)},   R_k = V_{i>=k} q(p,i),
 *
 * whose iterates q, Sq, ..., S^{n-1}q are disjoint and satisfy
 * T(V S^j q) >= (P_{Tp}e - (n-1)Tp)^+.
 *
 * Finite systems are never aperiodic, so the epsilon-bounded towers take an
 * explicit horizon: "N-aperiodic" means every relevant tau-cycle has length
 * at least N. The epsilon-bounded constructions pick N = floor((n-1)/eps)+1
 * and fail with NotAperiodicAtHorizon when some cycle is too short.
 */

#include <cstddef>
#include <string>
#include <vector>

#include "kr/ceps.hpp"
#include "kr/certificate.hpp"
#include "kr/lattice.hpp"

namespace kr {

struct Tower {
    /// The component the tower was grown from (p).
    Component source;
    Component base;
    std::size_t height = 0;
    /// levels[i] = S^i base.
    std::vector<Component> levels;
    /// scope minus the union of the levels.
    Component residual;
    /// Omega for ordinary towers, v for build_tower_eps_LS.
    Component scope;
    /// The inequality the construction certifies.
    Certificate bound;
    /// Intermediate inequalities of the construction, checked exactly too.
    std::vector<Certificate> auxiliary;
    /// Horizon N used by the epsilon-bounded constructions, 0 otherwise.
    std::size_t horizon = 0;
    std::vector<std::string> warnings;

    Component covered() const;
    /// bound and every auxiliary certificate hold.
    bool holds() const;
};

/// Throws NotErgodic, DomainError (n < 1). p empty yields a degenerate tower
/// with a warning.
Tower build_tower(const GroundSystem& sys, const Component& p, std::size_t n);

enum class AperiodicMode { Definitional, Criterion };

/// Criterion: every tau-cycle meeting v has length >= N.
/// Definitional: for every nonzero c <= v there are k >= N and u <= c with
/// q(u,k) != 0, by exhaustive enumeration; refused for |Omega| > 12.
bool n_aperiodic(const GroundSystem& sys, const Component& v, std::size_t horizon, AperiodicMode mode);

inline constexpr std::size_t kDefinitionalAperiodicLimit = 12;

/// One point (the smallest index) per cycle. Needs every cycle longer than N.
Component find_base_component(const GroundSystem& sys, std::size_t horizon);

/// Horizon N = floor((n-1)/eps) + 1.
std::size_t eps_horizon(std::size_t n, const Rational& eps);

/// Tower with T(residual) <= eps e.
Tower build_tower_eps(const GroundSystem& sys, std::size_t n, const Rational& eps);

/// Tower inside the orbit-invariant component v with L_S(residual) <= eps v.
Tower build_tower_eps_LS(const GroundSystem& sys, const Component& v, std::size_t n, const Rational& eps);

}  // namespace kr
