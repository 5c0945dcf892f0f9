#include "kr/periodic_approx.hpp"

#include <algorithm>
#include <random>

#include "kr/errors.hpp"
#include "kr/tower.hpp"

namespace kr {

namespace {

std::size_t count_cycles(const std::vector<std::size_t>& map, std::map<std::size_t, std::size_t>* histogram) {
    std::vector<bool> seen(map.size(), false);
    std::size_t longest = 0;
    for (std::size_t s = 0; s < map.size(); ++s) {
        if (seen[s]) continue;
        std::size_t len = 0;
        for (std::size_t x = s; !seen[x]; x = map[x]) {
            seen[x] = true;
            ++len;
        }
        longest = std::max(longest, len);
        if (histogram != nullptr) ++(*histogram)[len];
    }
    return longest;
}

Rational max_entry(const LatticeElement& f) {
    Rational m = f[0];
    for (const auto& x : f.values()) m = std::max(m, x);
    return m;
}

}  // namespace

Component PeriodicApproximation::top() const { return h.minus(q); }

std::size_t PeriodicApproximation::max_cycle_length() const { return count_cycles(tau_prime, nullptr); }

std::map<std::size_t, std::size_t> PeriodicApproximation::cycle_histogram() const {
    std::map<std::size_t, std::size_t> hist;
    count_cycles(tau_prime, &hist);
    return hist;
}

bool PeriodicApproximation::holds() const {
    if (!majorant.holds) return false;
    if (certificate_mode != "none" && !scan_holds) return false;
    return std::all_of(auxiliary.begin(), auxiliary.end(), [](const Certificate& c) { return c.holds; });
}

LatticeElement apply_s_prime(const GroundSystem& sys, const PeriodicApproximation& a, const LatticeElement& f) {
    const auto n = static_cast<std::int64_t>(a.period_bound);
    return koopman(sys, 1, band_project(a.q, f)) + koopman(sys, 1 - n, band_project(a.top(), f)) +
           band_project(a.h.complement(), f);
}

LatticeElement s_prime_preimage(const GroundSystem& sys, const PeriodicApproximation& a, const LatticeElement& f) {
    const auto n = static_cast<std::int64_t>(a.period_bound);
    return band_project(a.h.complement(), f) + band_project(a.q, koopman(sys, -1, f)) +
           band_project(a.top(), koopman(sys, n - 1, f));
}

LatticeElement koopman_of(const std::vector<std::size_t>& map, std::int64_t j, const LatticeElement& f) {
    if (f.size() != map.size()) throw DimensionError("koopman_of: element length differs from map");
    std::vector<std::size_t> step = map;
    if (j < 0) {
        for (std::size_t i = 0; i < map.size(); ++i) step[map[i]] = i;
    }
    std::vector<Rational> out;
    out.reserve(f.size());
    const auto reps = j < 0 ? -j : j;
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::size_t x = i;
        for (std::int64_t r = 0; r < reps; ++r) x = step[x];
        out.push_back(f[x]);
    }
    return LatticeElement(std::move(out));
}

PeriodicApproximation build_s_prime(const GroundSystem& sys, const Component& p, std::size_t n) {
    if (n < 2) throw DomainError("build_s_prime needs n >= 2");
    if (p.size() != sys.size()) throw DimensionError("build_s_prime: component on a different ground set");
    if (p.empty()) throw DomainError("build_s_prime needs a nonzero tower base p");

    PeriodicApproximation a;
    a.period_bound = n;
    a.p = p;
    a.h = Component::none(sys.size());
    a.q = Component::none(sys.size());
    for (std::size_t i = 0; i < n; ++i) {
        const Component level = component_image(sys, static_cast<std::int64_t>(i), p);
        if (!level.disjoint_from(a.h)) {
            throw DomainError("build_s_prime: S^" + std::to_string(i) + " p meets an earlier iterate; " + p.str() +
                              " is not a tower base of height " + std::to_string(n));
        }
        a.h = a.h.join(level);
        if (i + 2 <= n) a.q = a.q.join(level);
    }

    // S'e = S chi_q + chi_p + chi_{e-h} must be e.
    const LatticeElement e = sys.unit();
    if (apply_s_prime(sys, a, e) != e) {
        throw InternalConsistencyError("S' terms do not partition unity for p = " + p.str());
    }

    // S' chi_y is the indicator of tau'^{-1}(y).
    a.tau_prime.assign(sys.size(), sys.size());
    std::vector<bool> hit(sys.size(), false);
    for (std::size_t y = 0; y < sys.size(); ++y) {
        const LatticeElement chi = Component::of(sys.size(), {y}).indicator();
        const LatticeElement image = apply_s_prime(sys, a, chi);
        if (!is_component(image) || to_component(image).count() != 1) {
            throw InternalConsistencyError("S' chi_" + std::to_string(y) + " = " + image.str() +
                                           " is not a point indicator");
        }
        const std::size_t x = to_component(image).first();
        if (a.tau_prime[x] != sys.size()) {
            throw InternalConsistencyError("tau' assigned twice at " + std::to_string(x));
        }
        a.tau_prime[x] = y;
        hit[y] = true;
        if (cond_expectation(sys, image) != cond_expectation(sys, chi)) {
            throw InternalConsistencyError("T S' != T on chi_" + std::to_string(y));
        }
    }
    if (!std::all_of(hit.begin(), hit.end(), [](bool b) { return b; })) {
        throw InternalConsistencyError("tau' is not a permutation");
    }
    if (a.max_cycle_length() > n) {
        throw InternalConsistencyError("tau' has a cycle longer than n = " + std::to_string(n));
    }

    const LatticeElement maj = Rational(2) * cond_expectation(sys, p.indicator()) +
                               Rational(2) * cond_expectation(sys, a.h.complement().indicator());
    a.eps = max_entry(maj);
    a.majorant = certify("2Tp + 2T(e-h) <= eps e", maj, Relation::LessEqual, a.eps * e);
    a.worst_distance = LatticeElement::zero(sys.size());
    return a;
}

LatticeElement distance_profile(const GroundSystem& sys, const PeriodicApproximation& a, const Component& u) {
    if (u.size() != sys.size() || a.tau_prime.size() != sys.size()) {
        throw DimensionError("distance_profile: component on a different ground set");
    }
    const Component via_s = component_image(sys, 1, u);  // u o tau
    std::vector<std::size_t> via_s_prime;                // u o tau'
    for (std::size_t x = 0; x < sys.size(); ++x) {
        if (u.contains(a.tau_prime[x])) via_s_prime.push_back(x);
    }
    const Component other = Component::of(sys.size(), via_s_prime);
    const Component differ = via_s.minus(other).join(other.minus(via_s));
    return cond_expectation(sys, differ.indicator());
}

void certify_distance(const GroundSystem& sys, PeriodicApproximation& a, const Rational& eps,
                      const CertifyOptions& options) {
    const LatticeElement e = sys.unit();
    const LatticeElement bound = eps * e;
    a.eps = eps;
    a.majorant = certify(a.majorant.name, a.majorant.lhs, Relation::LessEqual, bound);

    LatticeElement worst = LatticeElement::zero(sys.size());
    bool ok = true;
    std::uint64_t checked = 0;
    auto visit = [&](const Component& u) {
        const LatticeElement d = distance_profile(sys, a, u);
        worst = join(worst, d);
        ok = ok && leq(d, bound);
        ++checked;
    };

    if (sys.size() <= options.exhaustive_limit && sys.size() < 64) {
        a.certificate_mode = "exhaustive";
        const std::uint64_t total = std::uint64_t{1} << sys.size();
        for (std::uint64_t m = 0; m < total; ++m) visit(Component::from_mask(sys.size(), m));
    } else {
        a.certificate_mode = "sampled";
        std::mt19937_64 rng(options.seed);
        visit(Component::none(sys.size()));
        visit(sys.omega());
        for (std::uint64_t s = 0; s < options.samples; ++s) {
            std::vector<std::size_t> members;
            std::uint64_t bits = 0;
            for (std::size_t i = 0; i < sys.size(); ++i) {
                if (i % 64 == 0) bits = rng();
                if ((bits >> (i % 64)) & 1U) members.push_back(i);
            }
            visit(Component::of(sys.size(), members));
        }
    }
    a.components_checked = checked;
    a.worst_distance = worst;
    a.scan_holds = ok;
}

ApproxParameters approx_parameters(const Rational& eps) {
    if (eps.sign() <= 0 || eps >= Rational(1)) throw DomainError("eps must lie in (0,1), got " + eps.str());
    ApproxParameters params;
    params.n = static_cast<std::size_t>(floor_to_int(Rational(4) / eps)) + 1;
    params.horizon = eps_horizon(params.n, eps / Rational(4));
    return params;
}

PeriodicApproximation approximate_periodic(const GroundSystem& sys, const Rational& eps,
                                           const CertifyOptions& options) {
    const ApproxParameters params = approx_parameters(eps);
    require_conditionally_ergodic(sys, "approximate_periodic");
    for (const auto& cycle : sys.cycles()) {
        if (cycle.size() < params.min_cycle_length()) {
            throw NotAperiodicAtHorizon("approximate_periodic: NotAperiodicAtHorizon: cycle through " +
                                            std::to_string(cycle.front()) + " has length " +
                                            std::to_string(cycle.size()) + ", eps = " + eps.str() +
                                            " needs every cycle of length >= " +
                                            std::to_string(params.min_cycle_length()),
                                        cycle.front(), cycle.size(), params.min_cycle_length());
        }
    }

    const Tower tower = build_tower_eps(sys, params.n, eps / Rational(4));
    PeriodicApproximation a = build_s_prime(sys, tower.base, params.n);

    const LatticeElement e = sys.unit();
    a.auxiliary.push_back(tower.bound);
    for (const auto& c : tower.auxiliary) a.auxiliary.push_back(c);
    a.auxiliary.push_back(certify("Tp <= (1/n) e", cond_expectation(sys, a.p.indicator()), Relation::LessEqual,
                                  Rational(1, static_cast<std::int64_t>(params.n)) * e));
    certify_distance(sys, a, eps, options);
    return a;
}

}  // namespace kr
