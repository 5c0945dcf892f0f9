#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "support.hpp"

#include "kr/errors.hpp"
#include "kr/generators.hpp"
#include "kr/recurrence.hpp"
#include "kr/tower.hpp"
#include "oracles.hpp"

using namespace kr;
using oracle::vec;

namespace {

GroundSystem two_cycles_one_block(std::size_t m) {
    RawSystem r = direct_product({single_cycle(m), single_cycle(m)}).raw();
    std::vector<std::int64_t> all;
    for (std::int64_t i = 0; i < r.size; ++i) all.push_back(i);
    r.blocks = {all};
    return GroundSystem(r);
}

void check_tower_shape(const GroundSystem& sys, const Tower& t, const Component& scope) {
    REQUIRE(t.levels.size() == t.height);
    Component covered = Component::none(sys.size());
    for (std::size_t i = 0; i < t.height; ++i) {
        CHECK(t.levels[i] == oracle::set_image(sys, static_cast<long>(i), t.base));
        CHECK(covered.disjoint_from(t.levels[i]));
        covered = covered.join(t.levels[i]);
    }
    CHECK(covered == t.covered());
    CHECK(t.residual.disjoint_from(covered));
    CHECK(t.residual.join(covered) == scope);
    CHECK(t.scope == scope);
}

}  // namespace

TEST_CASE("epsilon-free tower on the swap system") {
    const auto swap = swap_example();
    const auto p = Component::of(2, {0});
    const auto t1 = build_tower(swap, p, 1);
    CHECK(t1.holds());
    CHECK(cond_expectation(swap, t1.base.indicator()) == vec({1, 1}));
    CHECK(t1.bound.rhs == vec({1, 1}));

    const auto t3 = build_tower(swap, p, 3);
    CHECK(t3.base.empty());
    CHECK(t3.bound.rhs == vec({0, 0}));
    CHECK(t3.holds());
}

TEST_CASE("epsilon-free tower on the 7-cycle") {
    const auto c7 = single_cycle(7);
    const auto t = build_tower(c7, Component::of(7, {0}), 3);
    CHECK(t.base == Component::of(7, {0, 4}));
    REQUIRE(t.levels.size() == 3);
    CHECK(t.levels[0] == Component::of(7, {0, 4}));
    CHECK(t.levels[1] == Component::of(7, {3, 6}));
    CHECK(t.levels[2] == Component::of(7, {2, 5}));
    CHECK(t.residual == Component::of(7, {1}));
    CHECK(t.bound.lhs == LatticeElement::constant(7, Rational(6, 7)));
    CHECK(t.bound.rhs == LatticeElement::constant(7, Rational(5, 7)));
    CHECK(t.bound.relation == Relation::GreaterEqual);
    CHECK(t.holds());
    check_tower_shape(c7, t, c7.omega());
}

TEST_CASE("epsilon-free tower edge cases") {
    const auto c5 = single_cycle(5);
    const auto empty = build_tower(c5, Component::none(5), 2);
    CHECK(empty.base.empty());
    CHECK_FALSE(empty.warnings.empty());
    CHECK(empty.residual == c5.omega());
    CHECK_THROWS_AS(build_tower(c5, Component::of(5, {0}), 0), DomainError);
    CHECK_THROWS_AS(build_tower(two_cycles_one_block(3), Component::of(6, {0}), 2), NotErgodic);
}

TEST_CASE("n_aperiodic") {
    const auto c35 = direct_product({single_cycle(3), single_cycle(5)});
    for (auto mode : {AperiodicMode::Definitional, AperiodicMode::Criterion}) {
        CHECK(n_aperiodic(c35, c35.omega(), 3, mode));
        CHECK_FALSE(n_aperiodic(c35, c35.omega(), 4, mode));
        CHECK(n_aperiodic(c35, Component::of(8, {4}), 5, mode));
    }
    const auto fixed = direct_product({single_cycle(1), single_cycle(4)});
    for (auto mode : {AperiodicMode::Definitional, AperiodicMode::Criterion}) {
        CHECK_FALSE(n_aperiodic(fixed, Component::of(5, {0}), 2, mode));
        for (std::size_t N = 1; N <= 4; ++N) CHECK(n_aperiodic(single_cycle(4), Component::of(4, {2}), N, mode));
    }
    CHECK_THROWS_AS(n_aperiodic(single_cycle(13), Component::of(13, {0}), 2, AperiodicMode::Definitional),
                    DomainError);
    CHECK(n_aperiodic(single_cycle(13), Component::of(13, {0}), 13, AperiodicMode::Criterion));
    CHECK_THROWS_AS(n_aperiodic(c35, Component::none(8), 2, AperiodicMode::Criterion), DomainError);
    CHECK_THROWS_AS(n_aperiodic(c35, c35.omega(), 0, AperiodicMode::Criterion), DomainError);
}

TEST_CASE("n_aperiodic modes agree exhaustively on small systems") {
    for (std::uint64_t trial = 0; trial < 12; ++trial) {
        RandomSpec spec;
        spec.seed = mix_seed(29, trial);
        spec.num_blocks = {1, 3};
        spec.cycle_lengths = {1, 3};
        spec.cycles_per_block = {1, 2};
        spec.ergodic = trial % 2 == 0;
        const auto sys = random_system(spec);
        REQUIRE(sys.size() <= 12);
        for (std::size_t N = 1; N <= 4; ++N) {
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << sys.size()); ++mask) {
                const auto v = Component::from_mask(sys.size(), mask);
                CHECK(n_aperiodic(sys, v, N, AperiodicMode::Definitional) ==
                      n_aperiodic(sys, v, N, AperiodicMode::Criterion));
            }
        }
    }
}

TEST_CASE("find_base_component") {
    CHECK(find_base_component(direct_product({single_cycle(7), single_cycle(9)}), 3) == Component::of(16, {0, 7}));
    CHECK(find_base_component(single_cycle(6), 5) == Component::of(6, {0}));
    try {
        find_base_component(single_cycle(5), 5);
        FAIL("expected NotAperiodicAtHorizon");
    } catch (const NotAperiodicAtHorizon& ex) {
        CHECK(ex.cycle_min() == 0);
        CHECK(ex.cycle_length() == 5);
        CHECK(ex.required_length() == 6);
    }
}

TEST_CASE("epsilon-bounded tower") {
    CHECK(eps_horizon(2, Rational(1, 5)) == 6);
    CHECK(eps_horizon(1, Rational(1, 2)) == 1);
    CHECK(eps_horizon(9, Rational(1, 8)) == 65);
    CHECK_THROWS_AS(eps_horizon(2, Rational(0)), DomainError);
    CHECK_THROWS_AS(eps_horizon(2, Rational(-1, 2)), DomainError);

    const auto c12 = single_cycle(12);
    const auto t = build_tower_eps(c12, 2, Rational(1, 5));
    CHECK(t.horizon == 6);
    CHECK(t.source == Component::of(12, {0}));
    CHECK(t.base == Component::of(12, {0, 2, 4, 6, 8, 10}));
    CHECK(t.residual.empty());
    CHECK(t.bound.lhs == LatticeElement::zero(12));
    CHECK(t.bound.rhs == LatticeElement::constant(12, Rational(1, 5)));
    CHECK(t.holds());
    for (const auto& a : t.auxiliary) {
        CAPTURE(a.name);
        CHECK(a.holds);
    }

    const auto t1 = build_tower_eps(single_cycle(2), 1, Rational(1, 2));
    CHECK(t1.horizon == 1);
    CHECK(t1.residual.empty());
    CHECK(t1.holds());

    for (auto eps : {Rational(1, 4), Rational(1, 2), Rational(99, 100)}) {
        CHECK_THROWS_AS(build_tower_eps(swap_example(), 3, eps), NotAperiodicAtHorizon);
    }
    CHECK_THROWS_AS(build_tower_eps(c12, 2, Rational(0)), DomainError);
    CHECK_THROWS_AS(build_tower_eps(two_cycles_one_block(12), 2, Rational(1, 5)), NotErgodic);
}

TEST_CASE("truncated product counterexample refuses the epsilon tower") {
    for (std::size_t M = 2; M <= 8; ++M) {
        const auto sys = product_counterexample(M);
        CHECK(is_conditionally_ergodic(sys));
        CHECK_FALSE(n_aperiodic(sys, sys.omega(), 2, AperiodicMode::Criterion));
        for (std::size_t n = 2; n <= 6; ++n) {
            for (auto eps : {Rational(1, static_cast<std::int64_t>(n + 1)), Rational(1, 10)}) {
                CHECK_THROWS_AS(build_tower_eps(sys, n, eps), NotAperiodicAtHorizon);
            }
        }
    }
}

TEST_CASE("epsilon tower certified against the orbit average") {
    const auto two = two_cycles_one_block(12);
    const auto t = build_tower_eps_LS(two, two.omega(), 2, Rational(1, 5));
    CHECK(t.holds());
    CHECK(t.base == Component::of(24, {0, 2, 4, 6, 8, 10, 12, 14, 16, 18, 20, 22}));
    CHECK(t.residual.empty());
    check_tower_shape(two, t, two.omega());

    const auto v = Component::of(24, {12, 13, 14, 15, 16, 17, 18, 19, 20, 21, 22, 23});
    const auto tv = build_tower_eps_LS(two, v, 2, Rational(1, 5));
    CHECK(tv.holds());
    CHECK(tv.base == Component::of(24, {12, 14, 16, 18, 20, 22}));
    check_tower_shape(two, tv, v);
    CHECK(tv.bound.rhs == Rational(1, 5) * v.indicator());

    CHECK_THROWS_AS(build_tower_eps_LS(two, Component::of(24, {0, 1}), 2, Rational(1, 5)), DomainError);
    CHECK_THROWS_AS(build_tower_eps_LS(two, two.omega(), 4, Rational(1, 5)), NotAperiodicAtHorizon);

    // On an ergodic system with v = Omega it is the plain epsilon tower.
    const auto c = direct_product({single_cycle(9), single_cycle(11)});
    const auto a = build_tower_eps_LS(c, c.omega(), 3, Rational(1, 2));
    const auto b = build_tower_eps(c, 3, Rational(1, 2));
    CHECK(a.base == b.base);
    CHECK(a.levels == b.levels);
    CHECK(a.residual == b.residual);
}

TEST_CASE("random towers against oracles") {
    Rng rng(31);
    for (std::uint64_t trial = 0; trial < 200; ++trial) {
        RandomSpec spec;
        spec.seed = mix_seed(37, trial);
        spec.num_blocks = {1, 5};
        spec.cycle_lengths = {1, 12};
        const auto sys = random_system(spec);
        const auto p = random_component(rng, sys.size(), true);
        const std::size_t n = uniform_int(rng, 1, 8);
        CAPTURE(trial);
        CAPTURE(n);
        const auto t = build_tower(sys, p, n);
        CHECK(t.base == oracle::tower_base(sys, p, n));
        check_tower_shape(sys, t, sys.omega());
        for (std::size_t k = 1; k < n; ++k) CHECK(t.base.disjoint_from(oracle::set_image(sys, static_cast<long>(k), t.base)));

        const auto tp = oracle::block_average(sys, p.indicator());
        const auto support = band_project(support_component(tp), sys.unit());
        const auto rhs = pos_part(support - Rational(static_cast<std::int64_t>(n) - 1) * tp);
        const auto lhs = oracle::block_average(sys, t.covered().indicator());
        CHECK(t.bound.lhs == lhs);
        CHECK(t.bound.rhs == rhs);
        CHECK(leq(rhs, lhs));
        CHECK(t.holds());

        LatticeElement chain = LatticeElement::zero(sys.size());
        for (const auto& [i, part] : oracle::return_parts(sys, p)) {
            chain = chain + Rational(static_cast<std::int64_t>(n * (i / n))) * oracle::block_average(sys, part.indicator());
        }
        CHECK(lhs == chain);
    }
}

TEST_CASE("random epsilon towers") {
    const Rational epsilons[] = {Rational(1, 2), Rational(1, 5), Rational(1, 10)};
    for (std::uint64_t trial = 0; trial < 60; ++trial) {
        Rng rng(mix_seed(41, trial));
        const std::size_t n = uniform_int(rng, 1, 6);
        const Rational eps = epsilons[uniform_int(rng, 0, 2)];
        const std::size_t N = eps_horizon(n, eps);
        RandomSpec spec;
        spec.seed = mix_seed(43, trial);
        spec.num_blocks = {1, 3};
        spec.cycle_lengths = {N + 1, N + 8};
        const auto sys = random_system(spec);
        CAPTURE(trial);
        const auto t = build_tower_eps(sys, n, eps);
        check_tower_shape(sys, t, sys.omega());
        CHECK(leq(oracle::block_average(sys, t.residual.indicator()), eps * sys.unit()));
        CHECK(leq(Rational(static_cast<std::int64_t>(N)) * oracle::block_average(sys, t.source.indicator()), sys.unit()));
        CHECK(t.holds());
        for (const auto& a : t.auxiliary) CHECK(a.holds);
    }
}
