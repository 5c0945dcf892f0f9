// krtool: command-line front end for the kr toolkit.
//
// Every subcommand prints a JSON scenario report on stdout. Exit codes:
// 0 pass, 1 theorem check failed, 2 rejected input (validation or unmet
// hypothesis), 3 malformed input.

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "kr/errors.hpp"
#include "kr/generators.hpp"
#include "kr/harness.hpp"

using namespace kr;

namespace {

struct Flags {
    std::string system;
    std::string out;
    std::string csv;
    std::string p;
    std::string q;
    std::string v;
    std::string eps;
    std::string mode = "both";
    std::string kind;
    std::string suite;
    std::vector<std::string> params;
    std::uint64_t seed = 0;
    std::uint64_t trials = 1;
    std::uint64_t offset = 0;
    std::uint64_t samples = 10000;
    std::size_t n = 0;
    std::size_t horizon = 0;
    unsigned threads = 1;
    bool force = false;
    bool manual = false;
    bool timing = false;
};

Component component_flag(const GroundSystem& sys, const std::string& text, const char* flag) {
    const auto members = parse_index_list(text);
    for (auto i : members) {
        if (i >= sys.size()) {
            throw ParseError(std::string("--") + flag + ": index " + std::to_string(i) + " outside ground set of size " +
                             std::to_string(sys.size()));
        }
    }
    return Component::of(sys.size(), members);
}

Rational eps_flag(const std::string& text) {
    if (text.empty()) throw ParseError("--eps is required");
    return Rational::parse(text);
}

void require(bool present, const char* flag) {
    if (!present) throw ParseError(std::string("missing required flag --") + flag);
}

GroundSystem system_flag(const Flags& f) {
    require(!f.system.empty(), "system");
    return load_system(f.system, f.force);
}

void set_system_inputs(ScenarioReport& r, const Flags& f, const GroundSystem& sys) {
    r.inputs["system"] = f.system;
    r.inputs["system_digest"] = system_digest(sys);
}

void add_certificates(ScenarioReport& r, const Certificate& main, const std::vector<Certificate>& aux) {
    r.certificates.push_back(to_json(main));
    for (const auto& c : aux) r.certificates.push_back(to_json(c));
}

void mark_failed(ScenarioReport& r, const std::string& message, const std::string& reproduce) {
    r.outcome = "fail";
    r.exit_code = kExitTheoremFailure;
    Json failure;
    failure["message"] = message;
    failure["reproduce"] = reproduce;
    r.failures.push_back(std::move(failure));
}

std::string command_line(int argc, char** argv) {
    std::string s = "krtool";
    for (int i = 1; i < argc; ++i) s += std::string(" ") + argv[i];
    return s;
}

std::map<std::string, std::string> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, std::string> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0) throw ParseError("--params expects key=value, got '" + item + "'");
        out[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("parameter " + key + ": expected a non-negative integer, got '" + text + "'");
    }
}

IntRange to_range(const std::string& key, const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) {
        const auto v = to_uint(key, text);
        return {v, v};
    }
    return {to_uint(key, text.substr(0, dots)), to_uint(key, text.substr(dots + 2))};
}

bool to_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw ParseError("parameter " + key + ": expected true or false, got '" + text + "'");
}

ScenarioReport cmd_validate(const Flags& f) {
    require(!f.system.empty(), "system");
    const RawSystem raw = load_raw_system(f.system);
    const ValidationReport v = validate_ceps(raw);
    ScenarioReport r;
    r.scenario = "validate";
    r.inputs["system"] = f.system;
    r.details["validation"] = to_json(v);
    if (v.ok()) {
        const GroundSystem sys(raw);
        r.inputs["system_digest"] = system_digest(sys);
        r.details["conditionally_ergodic"] = is_conditionally_ergodic(sys);
        Json cycles = Json::array();
        for (const auto& c : sys.cycles()) cycles.push_back(c);
        r.details["cycles"] = cycles;
    } else {
        r.outcome = "error";
        r.exit_code = kExitRejected;
    }
    return r;
}

ScenarioReport cmd_gen(const Flags& f) {
    require(!f.kind.empty(), "kind");
    require(!f.out.empty(), "out");
    const auto params = parse_params(f.params);
    auto get = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = params.find(key);
        if (it == params.end()) return std::nullopt;
        return it->second;
    };
    auto check_keys = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [key, value] : params) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || key == a;
            if (!ok) throw ParseError("gen --kind " + f.kind + ": unknown parameter '" + key + "'");
        }
    };

    ScenarioReport r;
    r.scenario = "gen";
    r.inputs["kind"] = f.kind;
    r.inputs["params"] = params;
    RawSystem raw;
    bool negative = false;
    if (f.kind == "cycle") {
        check_keys({"m", "weight"});
        const auto m = to_uint("m", get("m").value_or("7"));
        std::optional<std::vector<Rational>> weights;
        if (const auto w = get("weight")) weights = std::vector<Rational>(m, Rational::parse(*w));
        raw = single_cycle(m, weights).raw();
    } else if (f.kind == "swap") {
        check_keys({});
        raw = swap_example().raw();
    } else if (f.kind == "product") {
        check_keys({"M", "cycles"});
        if (const auto cycles = get("cycles")) {
            std::vector<GroundSystem> factors;
            for (auto m : parse_index_list(*cycles)) factors.push_back(single_cycle(m));
            raw = direct_product(factors).raw();
        } else {
            raw = product_counterexample(to_uint("M", get("M").value_or("6"))).raw();
        }
    } else if (f.kind == "random") {
        check_keys({"blocks", "lengths", "cycles_per_block", "den", "ergodic"});
        RandomSpec spec;
        spec.seed = f.seed;
        if (const auto x = get("blocks")) spec.num_blocks = to_range("blocks", *x);
        if (const auto x = get("lengths")) spec.cycle_lengths = to_range("lengths", *x);
        if (const auto x = get("cycles_per_block")) spec.cycles_per_block = to_range("cycles_per_block", *x);
        if (const auto x = get("den")) spec.weight_denominator_bound = to_uint("den", *x);
        if (const auto x = get("ergodic")) spec.ergodic = to_bool("ergodic", *x);
        r.inputs["seed"] = f.seed;
        raw = random_system(spec).raw();
    } else if (f.kind == "split-swap") {
        // Negative fixture: tau swaps two points that sit in different blocks.
        check_keys({});
        raw = swap_example().raw();
        raw.blocks = {{0}, {1}};
        negative = true;
    } else {
        throw ParseError("unknown --kind '" + f.kind + "' (expected cycle, swap, product, random or split-swap)");
    }
    save_system(f.out, raw, negative);
    r.details["out"] = f.out;
    r.details["system"] = to_json(raw);
    r.details["negative_fixture"] = negative;
    return r;
}

ScenarioReport cmd_kac(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    require(!f.p.empty(), "p");
    const Component p = component_flag(sys, f.p, "p");
    ScenarioReport r;
    r.scenario = "kac";
    set_system_inputs(r, f, sys);
    r.inputs["p"] = to_json(p);
    const KacCertificate k = kac_certificate(sys, p);
    r.certificates.push_back(to_json(certify("T n(p) == P_{Tp}e", k.expected_return, Relation::Equal, k.support_unit)));
    r.details["return_time"] = to_json(first_return_time(sys, p));
    if (!k.holds) mark_failed(r, "T n(p) != P_{Tp}e", cmd);
    return r;
}

ScenarioReport cmd_decompose(const Flags& f) {
    const GroundSystem sys = system_flag(f);
    require(!f.p.empty(), "p");
    const Component p = component_flag(sys, f.p, "p");
    ScenarioReport r;
    r.scenario = "decompose";
    set_system_inputs(r, f, sys);
    r.inputs["p"] = to_json(p);
    const ReturnDecomposition d = return_decomposition(sys, p);
    r.details["decomposition"] = to_json(d);
    r.details["return_time"] = to_json(first_return_time(sys, d));
    if (!f.csv.empty()) {
        std::vector<std::vector<std::string>> rows;
        for (const auto& [k, part] : d.parts) {
            const LatticeElement mass = cond_expectation(sys, part.indicator());
            std::vector<std::string> row{std::to_string(k), part.str()};
            for (const auto& x : mass.values()) row.push_back(x.str());
            rows.push_back(std::move(row));
        }
        std::vector<std::string> header{"k", "q"};
        for (std::size_t i = 0; i < sys.size(); ++i) header.push_back("Tq_" + std::to_string(i));
        write_csv(f.csv, header, rows);
    }
    return r;
}

ScenarioReport cmd_recurrent(const Flags& f) {
    const GroundSystem sys = system_flag(f);
    require(!f.p.empty(), "p");
    require(!f.q.empty(), "q");
    const Component p = component_flag(sys, f.p, "p");
    const Component q = component_flag(sys, f.q, "q");
    ScenarioReport r;
    r.scenario = "recurrent";
    set_system_inputs(r, f, sys);
    r.inputs["p"] = to_json(p);
    r.inputs["q"] = to_json(q);
    r.details["recurrent"] = check_recurrent(sys, p, q);
    return r;
}

void write_tower_csv(const std::string& path, const GroundSystem& sys, const Tower& t) {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t j = 0; j < t.levels.size(); ++j) {
        std::vector<std::string> row{std::to_string(j), t.levels[j].str()};
        const auto avg = cond_expectation(sys, t.levels[j].indicator());
        for (const auto& x : avg.values()) row.push_back(x.str());
        rows.push_back(std::move(row));
    }
    std::vector<std::string> header{"level", "members"};
    for (std::size_t i = 0; i < sys.size(); ++i) header.push_back("T_" + std::to_string(i));
    write_csv(path, header, rows);
}

ScenarioReport tower_report(const std::string& scenario, const Flags& f, const GroundSystem& sys, const Tower& t,
                            const std::string& cmd) {
    ScenarioReport r;
    r.scenario = scenario;
    set_system_inputs(r, f, sys);
    r.inputs["n"] = f.n;
    if (!f.eps.empty()) r.inputs["eps"] = f.eps;
    r.details["tower"] = to_json(t);
    add_certificates(r, t.bound, t.auxiliary);
    if (!f.csv.empty()) write_tower_csv(f.csv, sys, t);
    if (!t.holds()) mark_failed(r, "tower certificate fails", cmd);
    return r;
}

ScenarioReport cmd_tower(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    require(!f.p.empty(), "p");
    require(f.n > 0, "n");
    const Component p = component_flag(sys, f.p, "p");
    ScenarioReport r = tower_report("tower", f, sys, build_tower(sys, p, f.n), cmd);
    r.inputs["p"] = to_json(p);
    return r;
}

ScenarioReport cmd_tower_eps(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    require(f.n > 0, "n");
    return tower_report("tower-eps", f, sys, build_tower_eps(sys, f.n, eps_flag(f.eps)), cmd);
}

ScenarioReport cmd_tower_ls(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    require(f.n > 0, "n");
    const Component v = f.v.empty() ? sys.omega() : component_flag(sys, f.v, "v");
    ScenarioReport r = tower_report("tower-ls", f, sys, build_tower_eps_LS(sys, v, f.n, eps_flag(f.eps)), cmd);
    r.inputs["v"] = to_json(v);
    return r;
}

ScenarioReport cmd_aperiodic(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    require(f.horizon > 0, "N");
    const Component v = f.v.empty() ? sys.omega() : component_flag(sys, f.v, "v");
    ScenarioReport r;
    r.scenario = "aperiodic";
    set_system_inputs(r, f, sys);
    r.inputs["v"] = to_json(v);
    r.inputs["N"] = f.horizon;
    r.inputs["mode"] = f.mode;
    if (f.mode == "criterion" || f.mode == "both") {
        r.details["criterion"] = n_aperiodic(sys, v, f.horizon, AperiodicMode::Criterion);
    }
    if (f.mode == "definitional" || f.mode == "both") {
        r.details["definitional"] = n_aperiodic(sys, v, f.horizon, AperiodicMode::Definitional);
    }
    if (f.mode == "both" && r.details["criterion"] != r.details["definitional"]) {
        mark_failed(r, "definitional and criterion modes disagree", cmd);
    }
    return r;
}

ScenarioReport cmd_approx(const Flags& f, const std::string& cmd) {
    const GroundSystem sys = system_flag(f);
    CertifyOptions options;
    options.samples = f.samples;
    options.seed = f.seed;
    ScenarioReport r;
    r.scenario = "approx";
    set_system_inputs(r, f, sys);
    PeriodicApproximation a;
    if (f.manual) {
        require(!f.p.empty(), "p");
        require(f.n > 0, "n");
        const Component p = component_flag(sys, f.p, "p");
        r.inputs["p"] = to_json(p);
        r.inputs["n"] = f.n;
        a = build_s_prime(sys, p, f.n);
        const Rational eps = f.eps.empty() ? a.eps : eps_flag(f.eps);
        r.inputs["eps"] = eps.str();
        certify_distance(sys, a, eps, options);
    } else {
        const Rational eps = eps_flag(f.eps);
        r.inputs["eps"] = eps.str();
        a = approximate_periodic(sys, eps, options);
    }
    r.details["approximation"] = to_json(a);
    add_certificates(r, a.majorant, a.auxiliary);
    if (!a.holds()) mark_failed(r, "periodic approximation certificate fails", cmd);
    return r;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact certificates for first-return, tower and periodic-approximation constructions on finite systems"};
    app.require_subcommand(1);
    Flags f;
    try {
        f.seed = default_seed(0);
        f.threads = default_threads();
    } catch (const ParseError& ex) {
        std::cerr << "krtool: " << ex.what() << "\n";
        return kExitMalformed;
    }
    app.add_flag("--timing", f.timing, "Report wall-clock time");

    auto system_opt = [&](CLI::App* sub) { sub->add_option("--system", f.system, "System file (JSON)"); };
    auto force_opt = [&](CLI::App* sub) {
        sub->add_flag("--force", f.force, "Load systems whose only failures are CEPS axioms");
    };

    auto* validate = app.add_subcommand("validate", "Check a system file against the CEPS axioms");
    system_opt(validate);

    auto* gen = app.add_subcommand("gen", "Write a generated system file");
    gen->add_option("--kind", f.kind, "cycle | swap | product | random | split-swap");
    gen->add_option("--params", f.params, "key=value pairs, e.g. m=7, cycles=7,9, lengths=2..8");
    gen->add_option("--seed", f.seed, "Seed for --kind random");
    gen->add_option("--out", f.out, "Output path");

    auto* kac = app.add_subcommand("kac", "Certify T n(p) = P_{Tp}e");
    auto* decompose = app.add_subcommand("decompose", "First-return decomposition of p");
    auto* recurrent = app.add_subcommand("recurrent", "Check p <= V_{n>=1} S^{-n} q");
    auto* tower = app.add_subcommand("tower", "Epsilon-free tower over p of height n");
    auto* tower_eps = app.add_subcommand("tower-eps", "Epsilon-bounded tower of height n");
    auto* tower_ls = app.add_subcommand("tower-ls", "Epsilon-bounded tower certified against the orbit average");
    auto* aperiodic = app.add_subcommand("aperiodic", "N-aperiodicity of v");
    auto* approx = app.add_subcommand("approx", "Periodic approximation S' of S");
    for (auto* sub : {kac, decompose, recurrent, tower, tower_eps, tower_ls, aperiodic, approx}) {
        system_opt(sub);
        force_opt(sub);
    }
    for (auto* sub : {kac, decompose, recurrent, tower, approx}) sub->add_option("--p", f.p, "Component as 0-based indices");
    recurrent->add_option("--q", f.q, "Component as 0-based indices");
    for (auto* sub : {tower, tower_eps, tower_ls, approx}) sub->add_option("--n", f.n, "Tower height / period bound");
    for (auto* sub : {tower_eps, tower_ls, approx}) sub->add_option("--eps", f.eps, "Rational such as 1/4");
    for (auto* sub : {tower_ls, aperiodic}) sub->add_option("--v", f.v, "Reference component (default: all of Omega)");
    for (auto* sub : {decompose, tower, tower_eps, tower_ls}) sub->add_option("--csv", f.csv, "Also write a CSV table");
    aperiodic->add_option("--N", f.horizon, "Horizon");
    aperiodic->add_option("--mode", f.mode, "definitional | criterion | both")
        ->check(CLI::IsMember({"definitional", "criterion", "both"}));
    approx->add_flag("--manual", f.manual, "Use the given --p and --n instead of the automatic parameters");
    approx->add_option("--samples", f.samples, "Sample count when |Omega| > 16");
    approx->add_option("--seed", f.seed, "Sampling seed");

    auto* suite = app.add_subcommand("suite", "Run a seeded property suite");
    suite->add_option("name", f.suite, "kac | poincare | tower | aperiodic | approx | all")->required();
    suite->add_option("--trials", f.trials, "Number of trials");
    suite->add_option("--seed", f.seed, "Base seed");
    suite->add_option("--offset", f.offset, "Index of the first trial");
    suite->add_option("--threads", f.threads, "Worker threads");

    auto* demo = app.add_subcommand("demo-paper-examples", "Reproduce the two-point swap example");

    for (auto* sub : app.get_subcommands({})) {
        if (sub != gen) sub->add_option("--out", f.out, "Also write the report here");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitMalformed;
    }

    const std::string cmd = command_line(argc, argv);
    const auto start = std::chrono::steady_clock::now();
    ScenarioReport report;
    auto* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    try {
        if (chosen == validate) report = cmd_validate(f);
        else if (chosen == gen) report = cmd_gen(f);
        else if (chosen == kac) report = cmd_kac(f, cmd);
        else if (chosen == decompose) report = cmd_decompose(f);
        else if (chosen == recurrent) report = cmd_recurrent(f);
        else if (chosen == tower) report = cmd_tower(f, cmd);
        else if (chosen == tower_eps) report = cmd_tower_eps(f, cmd);
        else if (chosen == tower_ls) report = cmd_tower_ls(f, cmd);
        else if (chosen == aperiodic) report = cmd_aperiodic(f, cmd);
        else if (chosen == approx) report = cmd_approx(f, cmd);
        else if (chosen == suite) report = run_suite({f.suite, f.trials, f.seed, f.offset, f.threads});
        else if (chosen == demo) report = demo_paper_examples();
    } catch (const ParseError& ex) {
        report = ScenarioReport{};
        report.scenario = name;
        report.outcome = "error";
        report.exit_code = kExitMalformed;
        report.details["error"] = ex.what();
    } catch (const InternalConsistencyError& ex) {
        report = ScenarioReport{};
        report.scenario = name;
        mark_failed(report, ex.what(), cmd);
    } catch (const NotAperiodicAtHorizon& ex) {
        report = ScenarioReport{};
        report.scenario = name;
        report.outcome = "error";
        report.exit_code = kExitRejected;
        report.details["error"] = ex.what();
        report.details["cycle_min"] = ex.cycle_min();
        report.details["cycle_length"] = ex.cycle_length();
        report.details["required_length"] = ex.required_length();
    } catch (const Error& ex) {
        report = ScenarioReport{};
        report.scenario = name;
        report.outcome = "error";
        report.exit_code = kExitRejected;
        report.details["error"] = ex.what();
    }
    if (f.timing) {
        report.timing_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    }

    const std::string text = report.to_json().dump(2);
    std::cout << text << "\n";
    if (!f.out.empty() && chosen != gen) {
        std::ofstream out(f.out);
        if (!out) {
            std::cerr << "krtool: cannot write " << f.out << "\n";
            return kExitMalformed;
        }
        out << text << "\n";
    }
    if (report.exit_code != kExitPass && report.details.contains("error")) {
        std::cerr << "krtool: " << report.details["error"].get<std::string>() << "\n";
    }
    return report.exit_code;
}
