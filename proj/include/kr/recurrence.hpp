#pragma once

/**
 * @file recurrence.hpp
 * @brief First-return components q(p,k), first recurrence time, Kac identity.
 *
 *   q(p,k) = p ^ S^{-k} p ^ (e - V_{j=1}^{k-1} S^{-j} p)
 *
 * With S f = f o tau this is the set of x in p whose backward orbit
 * tau^{-1}x, tau^{-2}x, ... first re-enters p at step k. Only the lattice
 * formula is used here.
 */

#include <cstddef>
#include <map>

#include "kr/ceps.hpp"
#include "kr/lattice.hpp"

namespace kr {

struct ReturnDecomposition {
    Component base;
    /// k -> q(p,k); only nonempty parts are stored.
    std::map<std::size_t, Component> parts;
    /// Largest k with q(p,k) nonempty, 0 when base is empty.
    std::size_t horizon = 0;

    /// q(p,k), empty when k is not stored.
    Component part(std::size_t k) const;
    /// R_k = V_{i >= k} q(p,i).
    Component tail(std::size_t k) const;
};

/// Throws DomainError for k < 1.
Component q_component(const GroundSystem& sys, const Component& p, std::size_t k);

ReturnDecomposition return_decomposition(const GroundSystem& sys, const Component& p);

/// n(p) = sum_k k q(p,k).
LatticeElement first_return_time(const GroundSystem& sys, const Component& p);
LatticeElement first_return_time(const GroundSystem& sys, const ReturnDecomposition& d);

/// p <= V_{n>=1} S^{-n} q. The join stabilizes once n reaches the longest
/// cycle meeting q, so the union is taken over n = 1..that length.
bool check_recurrent(const GroundSystem& sys, const Component& p, const Component& q);

struct KacCertificate {
    LatticeElement expected_return;  ///< T n(p)
    LatticeElement support_unit;     ///< P_{Tp} e
    bool holds = false;
};

/// T n(p) against P_{Tp} e. Throws NotErgodic on a non-ergodic system.
KacCertificate kac_certificate(const GroundSystem& sys, const Component& p);

}  // namespace kr
