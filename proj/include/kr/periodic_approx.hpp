#pragma once

/**
 * @file periodic_approx.hpp
 * @brief Periodic approximation of S from a Rokhlin tower.
 *
 * Given a tower base p of height n, with h = V_{i<n} S^i p and
 * q = V_{i<=n-2} S^i p,
 *
 *     S' = S P_q + S^{1-n} P_{S^{n-1}p} + P_{e-h}
 *
 * climbs the tower like S, sends the top level back to the base, and is the
 * identity off the tower. S' is again a Koopman operator; its point map
 * tau' is read off from S' applied to the coordinate indicators.
 */

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kr/ceps.hpp"
#include "kr/certificate.hpp"
#include "kr/lattice.hpp"

namespace kr {

struct PeriodicApproximation {
    std::vector<std::size_t> tau_prime;
    /// Tower height n; every tau'-cycle has length <= n.
    std::size_t period_bound = 0;
    Component p;  ///< tower base
    Component h;  ///< V_{i<n} S^i p
    Component q;  ///< V_{i<=n-2} S^i p
    Rational eps;
    /// 2Tp + 2T(e-h) <= eps e.
    Certificate majorant;
    /// Further inequalities of the construction (auto mode only).
    std::vector<Certificate> auxiliary;
    /// "none", "exhaustive" or "sampled".
    std::string certificate_mode = "none";
    std::uint64_t components_checked = 0;
    /// Coordinatewise max of T|(S-S')u| over the checked components; never
    /// claimed to be the lattice supremum.
    LatticeElement worst_distance;
    /// Every checked component satisfied T|(S-S')u| <= eps e.
    bool scan_holds = false;

    Component top() const;
    std::size_t max_cycle_length() const;
    /// cycle length -> number of tau'-cycles of that length
    std::map<std::size_t, std::size_t> cycle_histogram() const;
    bool holds() const;
};

/// Manual mode. p's first n iterates must be pairwise disjoint; n >= 2.
/// eps is set to the smallest scalar with 2Tp + 2T(e-h) <= eps e.
PeriodicApproximation build_s_prime(const GroundSystem& sys, const Component& p, std::size_t n);

/// S' f from the operator sum.
LatticeElement apply_s_prime(const GroundSystem& sys, const PeriodicApproximation& a, const LatticeElement& f);

/// f^ = P_{e-h} f + P_q S^{-1} f + P_{S^{n-1}p} S^{n-1} f, so that S' f^ = f.
LatticeElement s_prime_preimage(const GroundSystem& sys, const PeriodicApproximation& a, const LatticeElement& f);

/// Koopman operator of a point map: (f o tau'^j).
LatticeElement koopman_of(const std::vector<std::size_t>& map, std::int64_t j, const LatticeElement& f);

/// T |u o tau - u o tau'|.
LatticeElement distance_profile(const GroundSystem& sys, const PeriodicApproximation& a, const Component& u);

struct CertifyOptions {
    /// Exhaustive scan over all 2^|Omega| components up to this size.
    std::size_t exhaustive_limit = 16;
    std::uint64_t samples = 10000;
    std::uint64_t seed = 0;
};

/// Runs the per-component bound T|(S-S')u| <= eps e (exhaustively or on
/// seeded samples) and the majorant; fills the certificate fields.
void certify_distance(const GroundSystem& sys, PeriodicApproximation& a, const Rational& eps,
                      const CertifyOptions& options = {});

struct ApproxParameters {
    std::size_t n = 0;        ///< floor(4/eps) + 1
    std::size_t horizon = 0;  ///< floor(4(n-1)/eps) + 1
    std::size_t min_cycle_length() const { return horizon + 1; }
};
ApproxParameters approx_parameters(const Rational& eps);

/// Auto mode: eps-bounded tower with eps/4, then S'. Throws DomainError for
/// eps outside (0,1), NotAperiodicAtHorizon for short cycles.
PeriodicApproximation approximate_periodic(const GroundSystem& sys, const Rational& eps,
                                           const CertifyOptions& options = {});

}  // namespace kr
