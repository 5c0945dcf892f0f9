#include "kr/harness.hpp"

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>

#include "kr/errors.hpp"
#include "kr/generators.hpp"

namespace kr {

namespace {

struct TrialOutcome {
    bool ok = true;
    bool vacuous = false;
    std::string message;
    Json certificate;
};

TrialOutcome fail(std::string message, Json certificate = nullptr) {
    return TrialOutcome{false, false, std::move(message), std::move(certificate)};
}

RandomSpec kac_spec(std::uint64_t seed) {
    RandomSpec s;
    s.seed = seed;
    s.num_blocks = {1, 6};
    s.cycle_lengths = {1, 10};
    s.ergodic = true;
    return s;
}

LatticeElement random_element(Rng& rng, std::size_t size) {
    std::vector<Rational> v;
    for (std::size_t i = 0; i < size; ++i) {
        const auto num = static_cast<std::int64_t>(uniform_int(rng, 0, 10)) - 5;
        const auto den = static_cast<std::int64_t>(uniform_int(rng, 1, 4));
        v.emplace_back(num, den);
    }
    return LatticeElement(std::move(v));
}

TrialOutcome kac_trial(std::uint64_t seed) {
    const GroundSystem sys = random_system(kac_spec(seed));
    Rng rng(mix_seed(seed, 1));
    const Component p = random_component(rng, sys.size(), true);
    const KacCertificate c = kac_certificate(sys, p);
    if (!c.holds) {
        return fail("T n(p) != P_{Tp}e for p = " + p.str(),
                    to_json(certify("T n(p) == P_{Tp}e", c.expected_return, Relation::Equal, c.support_unit)));
    }
    return {};
}

TrialOutcome poincare_trial(std::uint64_t seed) {
    const GroundSystem sys = random_system(kac_spec(seed));
    Rng rng(mix_seed(seed, 1));
    const Component p = random_component(rng, sys.size(), true);
    const ReturnDecomposition d = return_decomposition(sys, p);

    Component uni = Component::none(sys.size());
    for (const auto& [k, part] : d.parts) {
        if (!uni.disjoint_from(part)) return fail("q(p," + std::to_string(k) + ") meets an earlier part");
        uni = uni.join(part);
        if (q_component(sys, p, k) != part) return fail("q_component disagrees with the decomposition at k = " + std::to_string(k));
        if (!component_image(sys, static_cast<std::int64_t>(k), part).subset_of(p)) {
            return fail("S^k q(p,k) is not <= p at k = " + std::to_string(k));
        }
    }
    if (uni != p) return fail("union of q(p,k) is " + uni.str() + ", p = " + p.str());

    for (const auto& [m, qm] : d.parts) {
        for (const auto& [n, qn] : d.parts) {
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) {
                    if (i == j && m == n) continue;
                    const Component a = component_image(sys, static_cast<std::int64_t>(i), qm);
                    const Component b = component_image(sys, static_cast<std::int64_t>(j), qn);
                    if (!a.disjoint_from(b)) {
                        return fail("S^" + std::to_string(i) + " q(p," + std::to_string(m) + ") meets S^" +
                                    std::to_string(j) + " q(p," + std::to_string(n) + ")");
                    }
                }
            }
        }
    }
    return {};
}

TrialOutcome tower_trial(std::uint64_t seed) {
    const GroundSystem sys = random_system(kac_spec(seed));
    Rng rng(mix_seed(seed, 1));
    const Component p = random_component(rng, sys.size(), true);
    const std::size_t n = uniform_int(rng, 1, 8);
    const Tower t = build_tower(sys, p, n);
    if (!t.holds()) return fail("tower certificate fails for n = " + std::to_string(n), to_json(t.bound));

    const ReturnDecomposition d = return_decomposition(sys, p);
    LatticeElement chain = LatticeElement::zero(sys.size());
    for (const auto& [i, part] : d.parts) {
        const auto coeff = static_cast<std::int64_t>(n * (i / n));
        chain = chain + Rational(coeff) * cond_expectation(sys, part.indicator());
    }
    const LatticeElement lhs = cond_expectation(sys, t.covered().indicator());
    if (lhs != chain) {
        return fail("proof-chain identity fails for n = " + std::to_string(n),
                    to_json(certify("T(V S^k q) == sum n[i/n] T q(p,i)", lhs, Relation::Equal, chain)));
    }
    return {};
}

TrialOutcome aperiodic_trial(std::uint64_t seed) {
    RandomSpec spec;
    spec.num_blocks = {1, 3};
    spec.cycle_lengths = {1, 5};
    spec.cycles_per_block = {1, 2};
    spec.ergodic = (seed & 1U) == 0;
    std::uint64_t attempt = 0;
    std::optional<GroundSystem> sys;
    while (!sys || sys->size() > 10) {
        spec.seed = mix_seed(seed, 100 + attempt++);
        sys = random_system(spec);
    }
    Rng rng(mix_seed(seed, 1));
    const std::size_t horizon = uniform_int(rng, 1, 6);
    const std::uint64_t total = std::uint64_t{1} << sys->size();
    for (std::uint64_t mask = 1; mask < total; ++mask) {
        const Component v = Component::from_mask(sys->size(), mask);
        const bool def = n_aperiodic(*sys, v, horizon, AperiodicMode::Definitional);
        const bool crit = n_aperiodic(*sys, v, horizon, AperiodicMode::Criterion);
        if (def != crit) {
            return fail("definitional (" + std::to_string(def) + ") and criterion (" + std::to_string(crit) +
                        ") disagree for v = " + v.str() + ", N = " + std::to_string(horizon));
        }
    }
    return {};
}

/// {x : tau'^k(x) in u} on masks.
std::uint64_t preimage_mask(const std::vector<std::size_t>& map, std::uint64_t u) {
    std::uint64_t out = 0;
    for (std::size_t x = 0; x < map.size(); ++x) {
        if ((u >> map[x]) & 1U) out |= std::uint64_t{1} << x;
    }
    return out;
}

TrialOutcome approx_trial(std::uint64_t seed) {
    RandomSpec spec;
    spec.seed = seed;
    spec.num_blocks = {1, 2};
    spec.cycle_lengths = {2, 8};
    spec.ergodic = true;
    const GroundSystem sys = random_system(spec);
    Rng rng(mix_seed(seed, 1));
    const Component p0 = random_component(rng, sys.size(), true);
    const std::size_t n = uniform_int(rng, 2, 4);
    const Tower t = build_tower(sys, p0, n);
    if (t.base.empty()) return TrialOutcome{true, true, "empty tower base", nullptr};

    PeriodicApproximation a = build_s_prime(sys, t.base, n);
    certify_distance(sys, a, a.eps);
    if (!a.holds()) return fail("distance bound fails", to_json(a));
    if (a.max_cycle_length() > n) return fail("tau' has a cycle longer than n");

    const std::uint64_t total = std::uint64_t{1} << sys.size();
    for (std::uint64_t u = 0; u < total; ++u) {
        std::uint64_t pn = u;
        for (std::size_t k = 0; k < n; ++k) pn = preimage_mask(a.tau_prime, pn);
        const std::uint64_t p1 = preimage_mask(a.tau_prime, u);
        if ((u & ~(pn | p1)) != 0) return fail("(S')^n u v S'u >= u fails for u = " + Component::from_mask(sys.size(), u).str());
    }
    for (int r = 0; r < 5; ++r) {
        const LatticeElement f = random_element(rng, sys.size());
        if (apply_s_prime(sys, a, s_prime_preimage(sys, a, f)) != f) return fail("S' f^ != f for f = " + f.str());
        if (apply_s_prime(sys, a, f) != koopman_of(a.tau_prime, 1, f)) return fail("S' is not the Koopman map of tau'");
    }
    return {};
}

std::function<TrialOutcome(std::uint64_t)> trial_for(const std::string& name) {
    if (name == "kac") return kac_trial;
    if (name == "poincare") return poincare_trial;
    if (name == "tower") return tower_trial;
    if (name == "aperiodic") return aperiodic_trial;
    if (name == "approx") return approx_trial;
    throw DomainError("unknown suite '" + name + "' (expected kac, poincare, tower, aperiodic, approx or all)");
}

void run_one_suite(const std::string& name, const SuiteOptions& options, ScenarioReport& report) {
    const auto trial = trial_for(name);
    std::vector<TrialOutcome> results(options.trials);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
        for (std::uint64_t i = next++; i < options.trials; i = next++) {
            const std::uint64_t index = options.offset + i;
            try {
                results[i] = trial(mix_seed(options.seed, index));
            } catch (const Error& ex) {
                results[i] = fail(std::string("error: ") + ex.what());
            }
        }
    };
    const unsigned width = std::max(1U, std::min<unsigned>(options.threads, static_cast<unsigned>(options.trials)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < width; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::uint64_t passed = 0;
    std::uint64_t vacuous = 0;
    for (std::uint64_t i = 0; i < options.trials; ++i) {
        const auto& r = results[i];
        if (r.ok) {
            ++passed;
            if (r.vacuous) ++vacuous;
            continue;
        }
        const std::uint64_t index = options.offset + i;
        Json f;
        f["suite"] = name;
        f["trial"] = index;
        f["trial_seed"] = mix_seed(options.seed, index);
        f["message"] = r.message;
        if (!r.certificate.is_null()) f["certificate"] = r.certificate;
        f["reproduce"] = "krtool suite " + name + " --trials 1 --seed " + std::to_string(options.seed) +
                         " --offset " + std::to_string(index);
        report.failures.push_back(std::move(f));
    }
    Json summary;
    summary["trials"] = options.trials;
    summary["passed"] = passed;
    summary["vacuous"] = vacuous;
    summary["failed"] = options.trials - passed;
    report.details[name] = summary;
}

}  // namespace

Json ScenarioReport::to_json() const {
    Json j;
    j["scenario"] = scenario;
    j["inputs"] = inputs;
    j["outcome"] = outcome;
    j["exit_code"] = exit_code;
    j["certificates"] = certificates;
    if (!details.empty()) j["details"] = details;
    if (!failures.empty()) j["failures"] = failures;
    if (timing_ms) j["timing_ms"] = *timing_ms;
    return j;
}

ScenarioReport run_suite(const SuiteOptions& options) {
    if (options.trials < 1) throw DomainError("suite needs --trials >= 1");
    ScenarioReport report;
    report.scenario = "suite " + options.name;
    report.inputs["trials"] = options.trials;
    report.inputs["seed"] = options.seed;
    report.inputs["offset"] = options.offset;

    if (options.name == "all") {
        for (const char* name : kSuiteNames) run_one_suite(name, options, report);
    } else {
        run_one_suite(options.name, options, report);
    }
    if (!report.failures.empty()) {
        report.outcome = "fail";
        report.exit_code = kExitTheoremFailure;
    }
    return report;
}

ScenarioReport demo_paper_examples() {
    ScenarioReport report;
    report.scenario = "demo-paper-examples";
    const GroundSystem sys = swap_example();
    report.inputs["system"] = to_json(sys);
    report.inputs["system_digest"] = system_digest(sys);
    const Component p = Component::of(2, {0});
    report.inputs["p"] = to_json(p);

    const LatticeElement e = sys.unit();
    const LatticeElement half = Rational(1, 2) * e;
    const LatticeElement zero = LatticeElement::zero(2);
    bool ok = true;
    auto expect = [&](const std::string& name, const LatticeElement& got, const LatticeElement& want) {
        Certificate c = certify(name, got, Relation::Equal, want);
        ok = ok && c.holds;
        report.certificates.push_back(to_json(c));
    };

    expect("Tp", cond_expectation(sys, p.indicator()), half);
    const bool ergodic = is_conditionally_ergodic(sys);
    ok = ok && ergodic;
    report.details["conditionally_ergodic"] = ergodic;

    const KacCertificate kac = kac_certificate(sys, p);
    expect("T n(p) == P_{Tp}e", kac.expected_return, kac.support_unit);

    const std::vector<LatticeElement> want_rhs = {e, half, zero, zero};
    const std::vector<LatticeElement> want_mass = {e, e, zero, zero};
    Json table = Json::array();
    for (std::size_t n = 1; n <= 4; ++n) {
        const Tower t = build_tower(sys, p, n);
        ok = ok && t.holds();
        expect("(P_{Tp}e - (n-1)Tp)^+ at n=" + std::to_string(n), t.bound.rhs, want_rhs[n - 1]);
        expect("T(V S^j q_n) at n=" + std::to_string(n), t.bound.lhs, want_mass[n - 1]);
        Json row;
        row["n"] = n;
        row["q_n"] = to_json(t.base.indicator());
        row["rhs"] = to_json(t.bound.rhs);
        row["T_of_union"] = to_json(t.bound.lhs);
        row["levels_disjoint"] = true;
        table.push_back(std::move(row));
    }
    report.details["tower_table"] = table;

    // The epsilon-bounded construction has no room on a 2-cycle at n = 3.
    try {
        build_tower_eps(sys, 3, Rational(1, 4));
        ok = false;
        report.details["tower_eps_n3"] = "unexpectedly succeeded";
    } catch (const NotAperiodicAtHorizon& ex) {
        report.details["tower_eps_n3"] = std::string("rejected: ") + ex.what();
    }

    if (!ok) {
        report.outcome = "fail";
        report.exit_code = kExitTheoremFailure;
    }
    return report;
}

std::uint64_t default_seed(std::uint64_t fallback) {
    if (const char* s = std::getenv("KR_SEED")) {
        try {
            return std::stoull(s);
        } catch (const std::exception&) {
            throw ParseError(std::string("KR_SEED is not an integer: ") + s);
        }
    }
    return fallback;
}

unsigned default_threads() {
    if (const char* s = std::getenv("KR_THREADS")) {
        try {
            return std::max(1U, static_cast<unsigned>(std::stoul(s)));
        } catch (const std::exception&) {
            throw ParseError(std::string("KR_THREADS is not an integer: ") + s);
        }
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

}  // namespace kr
