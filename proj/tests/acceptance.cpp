// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every comparison is exact; library results are checked against the
// pointwise oracles in oracles.hpp wherever both routes exist.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kr/errors.hpp"
#include "kr/generators.hpp"
#include "kr/periodic_approx.hpp"
#include "kr/recurrence.hpp"
#include "kr/tower.hpp"
#include "oracles.hpp"

using namespace kr;

namespace {

class Check {
public:
    void expect(bool ok, const std::string& what) {
        ++checks_;
        if (!ok) {
            ++failures_;
            if (first_.empty()) first_ = context_.empty() ? what : context_ + ": " + what;
        }
    }
    template <class Message>
    void expect_lazy(bool ok, Message&& message) {
        if (ok) ++checks_;
        else expect(false, message());
    }
    void context(std::string c) { context_ = std::move(c); }
    void note(std::string n) { note_ = std::move(n); }

    bool passed() const { return failures_ == 0; }
    std::uint64_t checks() const { return checks_; }
    std::uint64_t failures() const { return failures_; }
    const std::string& first() const { return first_; }
    const std::string& note() const { return note_; }

private:
    std::uint64_t checks_ = 0;
    std::uint64_t failures_ = 0;
    std::string context_;
    std::string first_;
    std::string note_;
};

std::string trial_label(std::uint64_t i) { return "trial " + std::to_string(i); }

LatticeElement unit_on_blocks_meeting(const GroundSystem& sys, const Component& p) {
    std::vector<Rational> v(sys.size(), Rational(0));
    for (const auto& block : sys.blocks()) {
        bool meets = false;
        for (auto x : block) meets = meets || p.contains(x);
        if (meets) {
            for (auto x : block) v[x] = Rational(1);
        }
    }
    return LatticeElement(v);
}

RandomSpec ergodic_up_to_64(std::uint64_t seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.num_blocks = {1, 8};
    spec.cycle_lengths = {1, 8};
    spec.ergodic = true;
    return spec;
}

// Criteria 1 and 2 share their trial set.
struct KacTrial {
    GroundSystem sys;
    Component p;
};

KacTrial kac_trial(std::uint64_t i) {
    const auto seed = mix_seed(1001, i);
    GroundSystem sys = random_system(ergodic_up_to_64(seed));
    Rng rng(mix_seed(seed, 1));
    Component p = random_component(rng, sys.size(), true);
    return {std::move(sys), std::move(p)};
}

void kac_identity(Check& c) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        c.context(trial_label(i));
        const auto [sys, p] = kac_trial(i);
        c.expect(sys.size() <= 64, "|Omega| > 64");
        c.expect(is_conditionally_ergodic(sys), "system not ergodic");
        const auto cert = kac_certificate(sys, p);
        std::vector<Rational> times;
        for (auto t : oracle::return_times(sys, p)) times.emplace_back(static_cast<std::int64_t>(t));
        const auto expected_return = oracle::block_average(sys, LatticeElement(times));
        const auto support = unit_on_blocks_meeting(sys, p);
        c.expect(cert.holds, "T n(p) != P_{Tp} e");
        c.expect(cert.expected_return == expected_return, "T n(p) differs from the trajectory oracle");
        c.expect(cert.support_unit == support, "P_{Tp} e differs from the block oracle");
        c.expect(expected_return == support, "oracle T n(p) != oracle P_{Tp} e");
    }
    c.note("1000 systems");
}

void poincare_decomposition(Check& c) {
    for (std::uint64_t i = 0; i < 1000; ++i) {
        c.context(trial_label(i));
        const auto [sys, p] = kac_trial(i);
        const auto d = return_decomposition(sys, p);
        Component uni = Component::none(sys.size());
        bool disjoint = true;
        for (const auto& [k, part] : d.parts) {
            disjoint = disjoint && uni.disjoint_from(part);
            uni = uni.join(part);
        }
        c.expect(disjoint, "parts overlap");
        c.expect(uni == p, "union of parts != p");
        const auto oracle_parts = oracle::return_parts(sys, p);
        c.expect(d.parts == oracle_parts, "lattice q(p,k) != trajectory first-return sets");
        for (const auto& [k, part] : oracle_parts) {
            c.expect(q_component(sys, p, k) == part, "q_component != trajectory set at k = " + std::to_string(k));
        }
    }
    c.note("1000 systems");
}

void shifted_disjointness(Check& c) {
    std::uint64_t pairs = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        c.context(trial_label(i));
        RandomSpec spec;
        spec.seed = mix_seed(3003, i);
        spec.num_blocks = {1, 4};
        spec.cycle_lengths = {1, 12};
        spec.ergodic = i % 2 == 0;
        const auto sys = random_system(spec);
        Rng rng(mix_seed(spec.seed, 1));
        const auto p = random_component(rng, sys.size(), true);
        const auto d = return_decomposition(sys, p);
        std::size_t largest_cycle = 1;
        for (const auto& cycle : sys.cycles()) largest_cycle = std::max(largest_cycle, cycle.size());
        c.expect(d.horizon <= largest_cycle, "return horizon exceeds the longest cycle");
        // Every m up to the horizon, empty parts included.
        for (std::size_t m = 1; m <= d.horizon; ++m) {
            const auto qm = q_component(sys, p, m);
            for (std::size_t n = 1; n <= d.horizon; ++n) {
                const auto qn = q_component(sys, p, n);
                for (std::size_t a = 0; a < m; ++a) {
                    const auto left = component_image(sys, static_cast<std::int64_t>(a), qm);
                    c.expect(left == oracle::set_image(sys, static_cast<long>(a), qm), "S^i q image mismatch");
                    for (std::size_t b = 0; b < n; ++b) {
                        if (a == b && m == n) continue;
                        ++pairs;
                        const auto right = component_image(sys, static_cast<std::int64_t>(b), qn);
                        c.expect_lazy(left.disjoint_from(right), [&] {
                            return "S^" + std::to_string(a) + " q(p," + std::to_string(m) + ") meets S^" +
                                   std::to_string(b) + " q(p," + std::to_string(n) + ")";
                        });
                    }
                }
            }
        }
    }
    c.note("200 instances, " + std::to_string(pairs) + " pairs");
}

void check_levels(Check& c, const GroundSystem& sys, const Tower& t, const Component& scope) {
    Component covered = Component::none(sys.size());
    bool disjoint = true;
    bool images = t.levels.size() == t.height;
    for (std::size_t i = 0; i < t.levels.size(); ++i) {
        images = images && t.levels[i] == oracle::set_image(sys, static_cast<long>(i), t.base);
        disjoint = disjoint && covered.disjoint_from(t.levels[i]);
        covered = covered.join(t.levels[i]);
    }
    c.expect(images, "levels are not S^i of the base");
    c.expect(disjoint, "levels not pairwise disjoint");
    c.expect(t.residual == scope.minus(covered), "residual is not scope minus the levels");
}

void eps_free_tower(Check& c) {
    for (std::uint64_t i = 0; i < 500; ++i) {
        c.context(trial_label(i));
        const auto seed = mix_seed(4004, i);
        RandomSpec spec;
        spec.seed = seed;
        spec.num_blocks = {1, 5};
        spec.cycle_lengths = {1, 12};
        const auto sys = random_system(spec);
        Rng rng(mix_seed(seed, 1));
        const auto p = random_component(rng, sys.size(), true);
        const std::size_t n = uniform_int(rng, 1, 8);
        const auto t = build_tower(sys, p, n);
        c.expect(t.base == oracle::tower_base(sys, p, n), "base differs from the return-time oracle");
        check_levels(c, sys, t, sys.omega());

        const auto tp = oracle::block_average(sys, p.indicator());
        const auto rhs = pos_part(unit_on_blocks_meeting(sys, p) - Rational(static_cast<std::int64_t>(n) - 1) * tp);
        const auto lhs = oracle::block_average(sys, t.covered().indicator());
        c.expect(leq(rhs, lhs), "T(V levels) < (P_{Tp}e - (n-1)Tp)^+");
        c.expect(t.bound.lhs == lhs && t.bound.rhs == rhs, "certificate sides differ from the oracle");
        c.expect(t.holds(), "library certificate fails");

        LatticeElement chain = LatticeElement::zero(sys.size());
        for (const auto& [k, part] : oracle::return_parts(sys, p)) {
            chain = chain + Rational(static_cast<std::int64_t>(n * (k / n))) * oracle::block_average(sys, part.indicator());
        }
        c.expect(lhs == chain, "T(V S^k q) != sum n floor(i/n) T q(p,i)");
    }
    c.note("500 systems, n <= 8");
}

void swap_regression(Check& c) {
    const auto swap = swap_example();
    const auto p = Component::of(2, {0});
    const LatticeElement half{Rational(1, 2), Rational(1, 2)};
    const LatticeElement one{Rational(1), Rational(1)};
    const LatticeElement zero{Rational(0), Rational(0)};
    c.expect(cond_expectation(swap, p.indicator()) == half, "Tp != (1/2,1/2)");
    for (std::size_t n = 1; n <= 6; ++n) {
        c.context("n = " + std::to_string(n));
        const auto t = build_tower(swap, p, n);
        const auto& want_rhs = n == 1 ? one : n == 2 ? half : zero;
        const auto& want_lhs = n <= 2 ? one : zero;
        c.expect(t.bound.rhs == want_rhs, "rhs " + t.bound.rhs.str());
        c.expect(t.bound.lhs == want_lhs, "T(V S^j q) " + t.bound.lhs.str());
        c.expect(t.holds(), "certificate fails");
        check_levels(c, swap, t, swap.omega());
    }
}

void eps_bounded_tower(Check& c) {
    const Rational epsilons[] = {Rational(1, 2), Rational(1, 5), Rational(1, 10)};
    std::size_t cycles = 0;
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& eps : epsilons) {
            const std::size_t N = (n - 1) * eps.raw().get_den().get_ui() / eps.raw().get_num().get_ui() + 1;
            c.expect(eps_horizon(n, eps) == N, "eps_horizon(" + std::to_string(n) + ", " + eps.str() + ")");
            for (std::size_t m : {N + 1, N + 2, 2 * N + 3}) {
                c.context("n = " + std::to_string(n) + ", eps = " + eps.str() + ", cycle " + std::to_string(m));
                ++cycles;
                const auto sys = single_cycle(m);
                const auto t = build_tower_eps(sys, n, eps);
                check_levels(c, sys, t, sys.omega());
                const auto tr = oracle::block_average(sys, t.residual.indicator());
                c.expect(leq(tr, eps * sys.unit()), "T(residual) > eps e");
                c.expect(t.bound.lhs == tr, "certificate lhs != T(residual)");
                c.expect(t.holds(), "certificate fails");
            }
        }
    }
    std::size_t refusals = 0;
    for (std::size_t M = 2; M <= 8; ++M) {
        const auto sys = product_counterexample(M);
        for (std::size_t n = 2; n <= 8; ++n) {
            const std::int64_t ni = static_cast<std::int64_t>(n);
            for (const auto& eps : {Rational(1, ni + 1), Rational(1, 2 * ni), Rational(1, 10), Rational(1, 100),
                                    Rational(ni - 1, ni * ni)}) {
                if (!(eps < Rational(1, ni))) continue;
                c.context("product M = " + std::to_string(M) + ", n = " + std::to_string(n) + ", eps = " + eps.str());
                bool refused = false;
                try {
                    build_tower_eps(sys, n, eps);
                } catch (const NotAperiodicAtHorizon&) {
                    refused = true;
                }
                c.expect(refused, "no NotAperiodicAtHorizon");
                ++refusals;
            }
        }
    }
    c.note(std::to_string(cycles) + " cycles, " + std::to_string(refusals) + " refusals");
}

void aperiodic_equivalence(Check& c) {
    std::uint64_t comparisons = 0;
    for (std::uint64_t i = 0; i < 50; ++i) {
        c.context(trial_label(i));
        RandomSpec spec;
        spec.num_blocks = {1, 3};
        spec.cycle_lengths = {1, 5};
        spec.cycles_per_block = {2, 2};
        spec.ergodic = i % 2 == 0;
        GroundSystem sys = swap_example();
        for (std::uint64_t attempt = 0;; ++attempt) {
            spec.seed = mix_seed(7007, i * 1000 + attempt);
            sys = random_system(spec);
            if (sys.size() <= 10) break;
        }
        const std::uint64_t total = std::uint64_t{1} << sys.size();
        for (std::size_t N = 1; N <= sys.size() + 1; ++N) {
            for (std::uint64_t mask = 1; mask < total; ++mask) {
                const auto v = Component::from_mask(sys.size(), mask);
                const bool def = n_aperiodic(sys, v, N, AperiodicMode::Definitional);
                const bool crit = n_aperiodic(sys, v, N, AperiodicMode::Criterion);
                bool long_orbits = true;
                for (auto x : v.members()) long_orbits = long_orbits && oracle::orbit(sys, x).size() >= N;
                ++comparisons;
                c.expect_lazy(def == crit && crit == long_orbits,
                              [&] { return "modes disagree at N = " + std::to_string(N) + ", v = " + v.str(); });
            }
        }
    }
    c.note("50 systems, " + std::to_string(comparisons) + " comparisons");
}

void check_s_prime_identities(Check& c, const GroundSystem& sys, const PeriodicApproximation& a, std::size_t n) {
    c.expect(a.tau_prime == oracle::tau_prime(sys, a.p, n), "tau' differs from the pointwise oracle");
    bool unity = true;
    for (std::size_t x = 0; x < sys.size(); ++x) {
        const int terms = (a.q.contains(sys.tau()[x]) ? 1 : 0) + (a.p.contains(x) ? 1 : 0) + (a.h.contains(x) ? 0 : 1);
        unity = unity && terms == 1;
    }
    c.expect(unity, "partition of unity fails");
    bool preserves = true;
    for (std::size_t y = 0; y < sys.size(); ++y) {
        const auto chi = Component::of(sys.size(), {y}).indicator();
        preserves = preserves && cond_expectation(sys, apply_s_prime(sys, a, chi)) == cond_expectation(sys, chi) &&
                    oracle::block_average(sys, koopman_of(a.tau_prime, 1, chi)) == oracle::block_average(sys, chi);
    }
    c.expect(preserves, "T S' != T");
    c.expect(a.max_cycle_length() <= n, "tau' has a cycle longer than n");
}

bool exhaustive_oracle_scan(const GroundSystem& sys, const PeriodicApproximation& a, const Rational& eps) {
    const auto bound = eps * sys.unit();
    const std::uint64_t total = std::uint64_t{1} << sys.size();
    for (std::uint64_t u = 0; u < total; ++u) {
        if (!leq(oracle::approx_distance(sys, a.tau_prime, Component::from_mask(sys.size(), u)), bound)) return false;
    }
    return true;
}

void periodic_approximation(Check& c) {
    c.context("(a) 7-cycle");
    const auto c7 = single_cycle(7);
    const auto a = build_s_prime(c7, Component::of(7, {0}), 3);
    c.expect(a.tau_prime == std::vector<std::size_t>{5, 1, 2, 3, 4, 6, 0}, "tau' is not (0 5 6)");
    c.expect(a.cycle_histogram() == std::map<std::size_t, std::size_t>{{1, 4}, {3, 1}}, "cycle type");
    check_s_prime_identities(c, c7, a, 3);

    c.context("(b) 100-cycle, eps = 1/2");
    const auto c100 = single_cycle(100);
    const auto b = approximate_periodic(c100, Rational(1, 2));
    const auto majorant = Rational(2) * oracle::block_average(c100, b.p.indicator()) +
                          Rational(2) * oracle::block_average(c100, b.h.complement().indicator());
    c.expect(b.majorant.lhs == majorant, "majorant lhs != 2Tp + 2T(e-h)");
    c.expect(b.majorant.rhs == Rational(1, 2) * c100.unit(), "majorant rhs != e/2");
    c.expect(leq(majorant, Rational(1, 2) * c100.unit()), "2Tp + 2T(e-h) > e/2");
    c.expect(b.majorant.holds && b.holds(), "certificate fails");
    check_s_prime_identities(c, c100, b, b.period_bound);

    c.context("(c) fixture setup");
    // Manual fixtures up to |Omega| = 16, each scanned by the library and by
    // the pointwise oracle.
    struct Fixture {
        std::string name;
        GroundSystem sys;
        Component p;
        std::size_t n;
    };
    std::vector<Fixture> fixtures;
    fixtures.push_back({"7-cycle", c7, Component::of(7, {0}), 3});
    fixtures.push_back({"16-cycle", single_cycle(16), Component::of(16, {0, 5, 11}), 3});
    fixtures.push_back({"16-cycle n=4", single_cycle(16), Component::of(16, {0}), 4});
    fixtures.push_back({"7x9", direct_product({single_cycle(7), single_cycle(9)}), Component::of(16, {0, 7}), 3});
    fixtures.push_back({"3x5x8", direct_product({single_cycle(3), single_cycle(5), single_cycle(8)}),
                        Component::of(16, {0, 3, 8, 12}), 2});
    for (std::uint64_t i = 0; i < 6; ++i) {
        RandomSpec spec;
        spec.num_blocks = {1, 2};
        spec.cycle_lengths = {2, 8};
        for (std::uint64_t attempt = 0;; ++attempt) {
            spec.seed = mix_seed(8008, i * 1000 + attempt);
            const auto sys = random_system(spec);
            if (sys.size() < 10 || sys.size() > 16) continue;
            Rng rng(mix_seed(spec.seed, 1));
            const std::size_t n = uniform_int(rng, 2, 4);
            const auto base = build_tower(sys, random_component(rng, sys.size(), true), n).base;
            if (base.empty()) continue;
            fixtures.push_back({"random " + std::to_string(i), sys, base, n});
            break;
        }
    }
    std::size_t at_16 = 0;
    for (const auto& f : fixtures) {
        c.context("(c) " + f.name);
        at_16 += f.sys.size() == 16 ? 1 : 0;
        auto s = build_s_prime(f.sys, f.p, f.n);
        check_s_prime_identities(c, f.sys, s, f.n);
        certify_distance(f.sys, s, s.eps);
        c.expect(s.certificate_mode == "exhaustive", "scan was not exhaustive");
        c.expect(s.components_checked == (std::uint64_t{1} << f.sys.size()), "scan skipped components");
        c.expect(s.scan_holds && s.holds(), "T|(S-S')u| > eps e for some u");
        c.expect(exhaustive_oracle_scan(f.sys, s, s.eps), "oracle scan finds T|(S-S')u| > eps e");
    }
    c.expect(at_16 >= 3, "fewer than three fixtures at |Omega| = 16");
    c.note(std::to_string(fixtures.size()) + " exhaustive fixtures, " + std::to_string(at_16) + " at |Omega| = 16");
}

void cesaro_convergence(Check& c) {
    std::size_t ergodic = 0;
    for (std::uint64_t i = 0; i < 200; ++i) {
        c.context(trial_label(i));
        RandomSpec spec;
        spec.seed = mix_seed(9009, i);
        spec.num_blocks = {1, 4};
        spec.cycle_lengths = {1, 8};
        spec.ergodic = i % 2 == 0;
        const auto sys = random_system(spec);
        const auto l = oracle::lcm_of_cycles(sys);
        bool all_equal = true;
        bool partial_matches = true;
        for (std::size_t y = 0; y < sys.size(); ++y) {
            const auto chi = Component::of(sys.size(), {y}).indicator();
            const auto ls = oracle::orbit_average(sys, chi);
            partial_matches = partial_matches && cesaro_partial_sum(sys, chi, l) == ls && cesaro_mean(sys, chi) == ls;
            all_equal = all_equal && ls == oracle::block_average(sys, chi);
        }
        Rng rng(mix_seed(spec.seed, 1));
        const auto f = oracle::random_element(rng, sys.size());
        partial_matches = partial_matches && cesaro_partial_sum(sys, f, l) == oracle::orbit_average(sys, f);
        c.expect(partial_matches, "partial Cesaro sum at the lcm != L_S");
        c.expect(is_conditionally_ergodic(sys) == all_equal, "ergodicity flag disagrees with L_S = T");
        c.expect(all_equal == spec.ergodic, "generated ergodicity differs");
        ergodic += all_equal ? 1 : 0;
    }
    c.note("200 systems, " + std::to_string(ergodic) + " ergodic");
}

void orbit_average_tower(Check& c) {
    for (std::size_t m : {8, 12, 20}) {
        RawSystem r = direct_product({single_cycle(m), single_cycle(m)}).raw();
        std::vector<std::int64_t> all;
        for (std::int64_t i = 0; i < r.size; ++i) all.push_back(i);
        r.blocks = {all};
        const GroundSystem sys(r);
        for (std::size_t n : {2, 3}) {
            const Rational eps(1, 5);
            if (eps_horizon(n, eps) + 1 > m) continue;
            c.context("two " + std::to_string(m) + "-cycles, n = " + std::to_string(n));
            c.expect(!is_conditionally_ergodic(sys), "fixture is ergodic");
            bool refused = false;
            try {
                build_tower_eps(sys, n, eps);
            } catch (const NotErgodic&) {
                refused = true;
            }
            c.expect(refused, "build_tower_eps accepted a non-ergodic system");

            const auto t = build_tower_eps_LS(sys, sys.omega(), n, eps);
            check_levels(c, sys, t, sys.omega());
            const auto lr = oracle::orbit_average(sys, t.residual.indicator());
            c.expect(t.bound.lhs == lr, "certificate lhs != L_S(residual)");
            c.expect(t.bound.rhs == eps * sys.unit(), "certificate rhs != eps e");
            c.expect(leq(lr, eps * sys.unit()), "L_S(residual) > eps e");
            c.expect(t.holds(), "certificate fails");
        }
    }
}

struct Criterion {
    int id;
    const char* title;
    std::function<void(Check&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Kac identity T n(p) = P_{Tp} e", kac_identity},
        {2, "first-return decomposition of p", poincare_decomposition},
        {3, "disjointness of shifted return sets", shifted_disjointness},
        {4, "epsilon-free tower bound and proof chain", eps_free_tower},
        {5, "swap system regression", swap_regression},
        {6, "epsilon-bounded tower and product refusal", eps_bounded_tower},
        {7, "aperiodicity modes agree", aperiodic_equivalence},
        {8, "periodic approximation", periodic_approximation},
        {9, "Cesaro limit and ergodicity", cesaro_convergence},
        {10, "orbit-average tower on a non-ergodic system", orbit_average_tower},
    };
    int failed = 0;
    for (const auto& cr : criteria) {
        Check c;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& ex) {
            c.expect(false, std::string("exception: ") + ex.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s criterion %2d: %s (%llu checks", c.passed() ? "PASS" : "FAIL", cr.id, cr.title,
                    static_cast<unsigned long long>(c.checks()));
        if (!c.note().empty()) std::printf(", %s", c.note().c_str());
        std::printf(", %.2f s)\n", secs);
        if (!c.passed()) {
            std::printf("      %llu failed; first: %s\n", static_cast<unsigned long long>(c.failures()), c.first().c_str());
            ++failed;
        }
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
