#include "kr/recurrence.hpp"

#include "kr/errors.hpp"

namespace kr {

Component ReturnDecomposition::part(std::size_t k) const {
    auto it = parts.find(k);
    return it == parts.end() ? Component::none(base.size()) : it->second;
}

Component ReturnDecomposition::tail(std::size_t k) const {
    Component r = Component::none(base.size());
    for (auto it = parts.lower_bound(k); it != parts.end(); ++it) r = r.join(it->second);
    return r;
}

Component q_component(const GroundSystem& sys, const Component& p, std::size_t k) {
    if (k < 1) throw DomainError("q_component needs k >= 1");
    if (p.size() != sys.size()) throw DimensionError("q_component: component on a different ground set");
    const auto kk = static_cast<std::int64_t>(k);
    Component earlier = Component::none(sys.size());  // V_{j=1}^{k-1} S^{-j} p, empty join is 0
    for (std::int64_t j = 1; j < kk; ++j) earlier = earlier.join(component_image(sys, -j, p));
    return p.meet(component_image(sys, -kk, p)).minus(earlier);
}

ReturnDecomposition return_decomposition(const GroundSystem& sys, const Component& p) {
    if (p.size() != sys.size()) throw DimensionError("return_decomposition: component on a different ground set");
    ReturnDecomposition d{p, {}, 0};
    const std::size_t limit = sys.max_cycle_length(p);
    Component earlier = Component::none(sys.size());
    for (std::size_t k = 1; k <= limit; ++k) {
        const Component back = component_image(sys, -static_cast<std::int64_t>(k), p);
        const Component q = p.meet(back).minus(earlier);
        if (!q.empty()) {
            d.parts.emplace(k, q);
            d.horizon = k;
        }
        earlier = earlier.join(back);
    }
    return d;
}

LatticeElement first_return_time(const GroundSystem& sys, const ReturnDecomposition& d) {
    LatticeElement n = LatticeElement::zero(sys.size());
    for (const auto& [k, part] : d.parts) {
        n = n + Rational(static_cast<std::int64_t>(k)) * part.indicator();
    }
    return n;
}

LatticeElement first_return_time(const GroundSystem& sys, const Component& p) {
    return first_return_time(sys, return_decomposition(sys, p));
}

bool check_recurrent(const GroundSystem& sys, const Component& p, const Component& q) {
    if (p.size() != sys.size() || q.size() != sys.size()) {
        throw DimensionError("check_recurrent: component on a different ground set");
    }
    const std::size_t limit = sys.max_cycle_length(q);
    Component reached = Component::none(sys.size());
    for (std::size_t n = 1; n <= limit; ++n) {
        reached = reached.join(component_image(sys, -static_cast<std::int64_t>(n), q));
    }
    return p.subset_of(reached);
}

KacCertificate kac_certificate(const GroundSystem& sys, const Component& p) {
    require_conditionally_ergodic(sys, "kac_certificate");
    if (p.size() != sys.size()) throw DimensionError("kac_certificate: component on a different ground set");
    KacCertificate c;
    c.expected_return = cond_expectation(sys, first_return_time(sys, p));
    const LatticeElement tp = cond_expectation(sys, p.indicator());
    c.support_unit = band_project(support_component(tp), sys.unit());
    c.holds = c.expected_return == c.support_unit;
    return c;
}

}  // namespace kr
