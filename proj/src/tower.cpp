#include "kr/tower.hpp"

#include <cstdint>

#include "kr/errors.hpp"
#include "kr/recurrence.hpp"

namespace kr {

namespace {

void check_levels(const GroundSystem& sys, const Tower& t) {
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
        const auto koop = koopman(sys, static_cast<std::int64_t>(i), t.base.indicator());
        if (koop != t.levels[i].indicator()) {
            throw InternalConsistencyError("tower level " + std::to_string(i) +
                                           " disagrees with the Koopman image of the base");
        }
        for (std::size_t j = i + 1; j < t.levels.size(); ++j) {
            if (!t.levels[i].disjoint_from(t.levels[j])) {
                throw InternalConsistencyError("tower levels " + std::to_string(i) + " and " + std::to_string(j) +
                                               " overlap for base " + t.base.str());
            }
        }
    }
}

NotAperiodicAtHorizon short_cycle(const std::vector<std::size_t>& cycle, std::size_t required,
                                  const std::string& operation) {
    return NotAperiodicAtHorizon(operation + ": NotAperiodicAtHorizon: cycle through " +
                                     std::to_string(cycle.front()) + " has length " + std::to_string(cycle.size()) +
                                     ", minimum required cycle length is " + std::to_string(required),
                                 cycle.front(), cycle.size(), required);
}

}  // namespace

Component Tower::covered() const {
    Component c = Component::none(scope.size());
    for (const auto& level : levels) c = c.join(level);
    return c;
}

bool Tower::holds() const {
    if (!bound.holds) return false;
    for (const auto& a : auxiliary) {
        if (!a.holds) return false;
    }
    return true;
}

Tower build_tower(const GroundSystem& sys, const Component& p, std::size_t n) {
    require_conditionally_ergodic(sys, "build_tower");
    if (n < 1) throw DomainError("build_tower needs n >= 1");
    if (p.size() != sys.size()) throw DimensionError("build_tower: component on a different ground set");

    Tower t;
    t.source = p;
    t.height = n;
    t.scope = sys.omega();

    const LatticeElement tp = cond_expectation(sys, p.indicator());
    const Component support = support_component(tp);

    if (p.empty()) {
        t.warnings.push_back("empty p: degenerate tower with empty base");
        t.base = Component::none(sys.size());
    } else {
        const ReturnDecomposition d = return_decomposition(sys, p);
        t.base = Component::none(sys.size());
        for (std::size_t j = 0; n * (j + 1) <= d.horizon; ++j) {
            t.base = t.base.join(component_image(sys, static_cast<std::int64_t>(n * j), d.tail(n * (j + 1))));
        }
        if (!t.base.subset_of(support)) {
            throw InternalConsistencyError("tower base " + t.base.str() + " is not a component of P_{Tp}e");
        }
    }

    for (std::size_t i = 0; i < n; ++i) t.levels.push_back(component_image(sys, static_cast<std::int64_t>(i), t.base));
    check_levels(sys, t);
    t.residual = t.scope.minus(t.covered());

    const LatticeElement rhs =
        pos_part(band_project(support, sys.unit()) - Rational(static_cast<std::int64_t>(n) - 1) * tp);
    t.bound = certify("T(V S^j q) >= (P_{Tp}e - (n-1)Tp)^+", cond_expectation(sys, t.covered().indicator()),
                      Relation::GreaterEqual, rhs);
    return t;
}

bool n_aperiodic(const GroundSystem& sys, const Component& v, std::size_t horizon, AperiodicMode mode) {
    if (v.size() != sys.size()) throw DimensionError("n_aperiodic: component on a different ground set");
    if (v.empty()) throw DomainError("n_aperiodic needs a nonzero component v");
    if (horizon < 1) throw DomainError("n_aperiodic needs N >= 1");

    if (mode == AperiodicMode::Criterion) {
        for (std::size_t x : v.members()) {
            if (sys.cycle_length_of(x) < horizon) return false;
        }
        return true;
    }

    if (sys.size() > kDefinitionalAperiodicLimit) {
        throw DomainError("n_aperiodic: definitional mode refused for |Omega| = " + std::to_string(sys.size()) +
                          " > " + std::to_string(kDefinitionalAperiodicLimit));
    }
    // witness[u] caches "some k >= N has q(u,k) != 0"; -1 = not computed yet.
    std::vector<std::int8_t> witness(std::size_t{1} << sys.size(), -1);
    auto has_long_return = [&](std::uint64_t u) {
        auto& w = witness[u];
        if (w < 0) w = return_decomposition(sys, Component::from_mask(sys.size(), u)).horizon >= horizon ? 1 : 0;
        return w == 1;
    };

    const std::uint64_t vmask = v.mask();
    for (std::uint64_t c = vmask; c != 0; c = (c - 1) & vmask) {
        bool found = false;
        for (std::uint64_t u = c; u != 0 && !found; u = (u - 1) & c) found = has_long_return(u);
        if (!found) return false;
    }
    return true;
}

Component find_base_component(const GroundSystem& sys, std::size_t horizon) {
    require_conditionally_ergodic(sys, "find_base_component");
    if (horizon < 1) throw DomainError("find_base_component needs N >= 1");
    std::vector<std::size_t> picks;
    for (const auto& cycle : sys.cycles()) {
        if (cycle.size() <= horizon) throw short_cycle(cycle, horizon + 1, "find_base_component");
        picks.push_back(cycle.front());
    }
    const Component c = Component::of(sys.size(), picks);

    std::vector<Component> images;
    for (std::size_t i = 0; i <= horizon; ++i) {
        images.push_back(component_image(sys, static_cast<std::int64_t>(i), c));
        for (std::size_t j = 0; j < i; ++j) {
            if (!images[i].disjoint_from(images[j])) {
                throw InternalConsistencyError("base component iterates " + std::to_string(j) + " and " +
                                               std::to_string(i) + " overlap");
            }
        }
    }
    if (support_component(cond_expectation(sys, c.indicator())) != sys.omega()) {
        throw InternalConsistencyError("base component does not satisfy P_{Tc}e = e");
    }
    return c;
}

std::size_t eps_horizon(std::size_t n, const Rational& eps) {
    if (eps.sign() <= 0) throw DomainError("eps must be positive, got " + eps.str());
    if (n < 1) throw DomainError("tower height must be >= 1");
    return static_cast<std::size_t>(floor_to_int(Rational(static_cast<std::int64_t>(n) - 1) / eps)) + 1;
}

Tower build_tower_eps(const GroundSystem& sys, std::size_t n, const Rational& eps) {
    const std::size_t horizon = eps_horizon(n, eps);
    require_conditionally_ergodic(sys, "build_tower_eps");
    for (const auto& cycle : sys.cycles()) {
        if (cycle.size() <= horizon) throw short_cycle(cycle, horizon + 1, "build_tower_eps");
    }

    const Component p = find_base_component(sys, horizon);
    Tower t = build_tower(sys, p, n);
    t.horizon = horizon;

    const LatticeElement e = sys.unit();
    const LatticeElement tp = cond_expectation(sys, p.indicator());
    t.auxiliary.push_back(t.bound);
    t.auxiliary.push_back(
        certify("N Tp <= T n(p) = e", Rational(static_cast<std::int64_t>(horizon)) * tp, Relation::LessEqual, e));
    if (n >= 2) {
        t.auxiliary.push_back(certify("Tp <= eps/(n-1) e", tp, Relation::LessEqual,
                                      (eps / Rational(static_cast<std::int64_t>(n) - 1)) * e));
    }
    t.bound = certify("T(e - V S^i q) <= eps e", cond_expectation(sys, t.residual.indicator()), Relation::LessEqual,
                      eps * e);
    return t;
}

Tower build_tower_eps_LS(const GroundSystem& sys, const Component& v, std::size_t n, const Rational& eps) {
    const std::size_t horizon = eps_horizon(n, eps);
    if (v.size() != sys.size()) throw DimensionError("build_tower_eps_LS: component on a different ground set");
    if (v.empty()) throw DomainError("build_tower_eps_LS needs a nonzero component v");
    if (component_image(sys, 1, v) != v) {
        throw DomainError("build_tower_eps_LS: v = " + v.str() + " is not a union of tau-orbits");
    }
    for (const auto& cycle : sys.cycles()) {
        if (v.contains(cycle.front()) && cycle.size() <= horizon) {
            throw short_cycle(cycle, horizon + 1, "build_tower_eps_LS");
        }
    }

    const Restriction r = restrict_to(orbit_refinement(sys), v);
    const Tower local = build_tower_eps(r.system, n, eps);

    Tower t;
    t.source = r.lift(local.source, sys.size());
    t.base = r.lift(local.base, sys.size());
    t.height = n;
    t.scope = v;
    t.horizon = horizon;
    for (std::size_t i = 0; i < n; ++i) t.levels.push_back(component_image(sys, static_cast<std::int64_t>(i), t.base));
    check_levels(sys, t);
    t.residual = v.minus(t.covered());

    const LatticeElement vi = v.indicator();
    const LatticeElement lp = cesaro_mean(sys, t.source.indicator());
    t.auxiliary.push_back(certify("L_S(V S^j q) >= (P_{L_S p}v - (n-1)L_S p)^+",
                                  cesaro_mean(sys, t.covered().indicator()), Relation::GreaterEqual,
                                  pos_part(band_project(support_component(lp), vi) -
                                           Rational(static_cast<std::int64_t>(n) - 1) * lp)));
    t.auxiliary.push_back(
        certify("N L_S p <= v", Rational(static_cast<std::int64_t>(horizon)) * lp, Relation::LessEqual, vi));
    if (n >= 2) {
        t.auxiliary.push_back(certify("L_S p <= eps/(n-1) v", lp, Relation::LessEqual,
                                      (eps / Rational(static_cast<std::int64_t>(n) - 1)) * vi));
    }
    t.bound = certify("L_S(v - V S^i q) <= eps v", cesaro_mean(sys, t.residual.indicator()), Relation::LessEqual,
                      eps * vi);
    return t;
}

}  // namespace kr
