#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "pdl.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kEnvelope = 2;
constexpr int kCheckFailed = 3;

struct Globals {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string defender = "lgr";
    std::string intruder = "optimal";
    std::string format = "csv";
    std::string svg;
    bool with_mis = false;
};

pdl::ScenarioSpec load_spec(const std::string& path) {
    if (path.empty()) throw pdl::ValidationError("--scenario is required");
    std::ifstream in(path);
    if (!in) throw pdl::ValidationError("cannot open scenario: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw pdl::ValidationError(std::string("scenario is not valid JSON: ") + e.what());
    }
    return pdl::scenario_from_json(j);
}

// stdout unless --out was given
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) throw pdl::ValidationError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::string hex(std::uint64_t v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

int cmd_analyze(const Globals& g) {
    pdl::ScenarioSpec spec = load_spec(g.scenario);
    if (g.seed) spec.seed = *g.seed;
    const pdl::Scenario sc = pdl::materialize(spec);
    const pdl::InitialAnalysis init = pdl::analyze_initial(sc.arena, sc.state);
    pdl::TeamSnapshot snap(sc.arena, sc.state);
    const auto everyone = snap.unremoved();
    nlohmann::json j;
    j["scenario_digest"] = hex(pdl::scenario_digest(spec));
    j["perimeter_length"] = sc.arena.length();
    j["nu"] = sc.arena.speeds.nu();
    j["n_d"] = snap.defender_count();
    j["n_a"] = snap.intruder_count();
    j["regions"] = pdl::regions_json(snap, everyone);
    j["q_lg"] = init.q_lg;
    j["g_star"] = init.g_star;
    j["q_mm"] = pdl::mm_assignment(snap, everyone).q_mm;
    if (snap.defender_count() + snap.intruder_count() <= 14) j["q_mis"] = pdl::mis_assignment(snap, everyone);
    else j["q_mis"] = nullptr;
    j["removed"] = init.removed;
    j["envelope"] = init.envelope();
    Output out(g.out);
    out.stream() << j.dump(2) << '\n';
    return kOk;
}

int cmd_assign(const Globals& g) {
    pdl::ScenarioSpec spec = load_spec(g.scenario);
    if (g.seed) spec.seed = *g.seed;
    const pdl::Scenario sc = pdl::materialize(spec);
    const pdl::AssignmentSet as = pdl::lgr_defense(sc.arena, sc.state, false);
    Output out(g.out);
    out.stream() << pdl::to_json(as).dump(2) << '\n';
    if (as.envelope_violation) {
        std::cerr << "envelope violation: " << as.note << '\n';
        return kEnvelope;
    }
    return kOk;
}

int cmd_simulate(const Globals& g) {
    pdl::ScenarioSpec spec = load_spec(g.scenario);
    if (g.seed) spec.seed = *g.seed;
    const pdl::Scenario sc = pdl::materialize(spec);
    pdl::RunOptions opt;
    opt.defender = pdl::parse_defender_policy(g.defender);
    opt.intruder = pdl::parse_intruder_policy(g.intruder);
    opt.seed = sc.seed;
    opt.dt = sc.dt;
    opt.max_time = sc.max_time;
    Output out(g.out);
    pdl::TraceWriter trace(&out.stream());
    opt.on_tick = trace.callback();
    const pdl::SimResult r = pdl::run(sc.arena, sc.state, opt);
    trace.finish(r);
    if (!g.svg.empty()) {
        std::ofstream svg(g.svg);
        if (!svg) throw pdl::ValidationError("cannot write " + g.svg);
        pdl::write_svg(svg, sc.arena, sc.state, trace, r);
    }
    for (const auto& v : r.violations) std::cerr << "monitor " << v.monitor << " violated at tick " << v.tick << '\n';
    if (r.timed_out) std::cerr << "timeout with " << r.survivors << " surviving intruders\n";
    if (r.envelope_violations > 0) {
        std::cerr << "envelope violation on " << r.envelope_violations << " ticks\n";
        return kEnvelope;
    }
    return kOk;
}

struct BatchArgs {
    std::vector<int> defenders{12};
    int gap = 1;
    std::vector<double> distances{0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5};
    int trials = 200;
    double nu = 1.0;
    std::string placement = "random";
    std::vector<std::string> simulate;
    std::string cells_out;
};

int cmd_batch(const Globals& g, const BatchArgs& b) {
    pdl::BatchParams p;
    if (!g.scenario.empty()) {
        p.base = load_spec(g.scenario);
    } else {
        p.base.nu = b.nu;
    }
    p.base.defenders.placement = b.placement;
    p.defenders = b.defenders;
    p.intruder_gap = b.gap;
    p.distances = b.distances;
    p.trials = b.trials;
    p.seed = g.seed.value_or(0);
    p.with_mis = g.with_mis;
    for (const auto& s : b.simulate) p.simulate.push_back(pdl::parse_policy_pair(s));
    if (g.format != "csv" && g.format != "json") throw pdl::ValidationError("--format must be csv or json");
    const pdl::BatchResult res = pdl::batch_scores(p);
    Output out(g.out);
    if (g.format == "json") {
        out.stream() << pdl::to_json(res).dump(2) << '\n';
    } else {
        pdl::write_records_csv(out.stream(), res, p.simulate);
        if (!b.cells_out.empty()) {
            Output cells(b.cells_out);
            pdl::write_cells_csv(cells.stream(), res);
        }
    }
    return kOk;
}

int cmd_timing(const Globals& g, const pdl::TimingParams& base) {
    pdl::TimingParams p = base;
    p.seed = g.seed.value_or(0);
    const pdl::TimingResult t = pdl::timing_experiment(p);
    Output out(g.out);
    pdl::write_timing_csv(out.stream(), t);
    for (const auto& n : t.notices) std::cerr << n << '\n';
    for (const auto& [c, s] : t.slopes) std::cerr << "slope " << c << ' ' << s << '\n';
    return kOk;
}

int cmd_oracle(const Globals& g, int states) {
    const pdl::OracleReport rep = pdl::run_oracles(g.seed.value_or(0), states);
    nlohmann::json j{{"states", rep.states},
                     {"dp_mismatches", rep.dp_mismatches},
                     {"removal_failures", rep.removal_failures},
                     {"membership_checks", rep.membership_checks},
                     {"membership_unstable", rep.membership_unstable},
                     {"failures", rep.failures},
                     {"ok", rep.ok()}};
    Output out(g.out);
    out.stream() << j.dump(2) << '\n';
    return rep.ok() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perimeter defense with local game regions"};
    app.fallthrough();
    app.require_subcommand(1);
    Globals g;
    app.add_option("--scenario", g.scenario, "scenario JSON");
    app.add_option("--seed", g.seed, "64-bit seed");
    app.add_option("--out", g.out, "output path, stdout if absent");
    app.add_option("--defender-policy", g.defender, "lgr | mm | static");
    app.add_option("--intruder-policy", g.intruder, "optimal | greedy | random");
    app.add_option("--format", g.format, "json | csv (batch)");
    app.add_option("--svg", g.svg, "write an SVG overlay (simulate)");
    app.add_flag("--with-mis", g.with_mis, "include the exhaustive baseline (batch)");

    auto* analyze = app.add_subcommand("analyze", "regions and scores of one scenario");
    auto* assign = app.add_subcommand("assign", "lgr assignment at t=0");
    auto* simulate = app.add_subcommand("simulate", "run the game and write a JSON-lines trace");

    BatchArgs b;
    auto* batch = app.add_subcommand("batch", "score statistics over random scenarios");
    batch->add_option("--defenders", b.defenders, "N_D per cell")->delimiter(',');
    batch->add_option("--gap", b.gap, "N_A = N_D - gap");
    batch->add_option("--distances", b.distances, "intruder distances")->delimiter(',');
    batch->add_option("--trials", b.trials, "trials per cell");
    batch->add_option("--nu", b.nu, "speed ratio when no --scenario is given");
    batch->add_option("--placement", b.placement, "uniform | random");
    batch->add_option("--simulate", b.simulate, "policy pairs to simulate, e.g. lgr:optimal")->delimiter(',');
    batch->add_option("--cells-out", b.cells_out, "per-cell aggregate CSV");

    pdl::TimingParams tp;
    auto* timing = app.add_subcommand("timing", "runtime scaling table");
    timing->add_option("--sizes", tp.sizes, "N_A values")->delimiter(',');
    timing->add_option("--mis-sizes", tp.mis_sizes, "N_A values for the exhaustive baseline")->delimiter(',');
    timing->add_option("--trials", tp.trials, "instances per size");
    timing->add_option("--distance", tp.distance, "intruder offset, 0 for half the defender spacing");
    timing->add_option("--mis-distance", tp.mis_distance, "intruder offset for the exhaustive baseline, 0 for --distance");

    int oracle_states = 300;
    auto* oracle = app.add_subcommand("oracle", "brute-force cross-checks");
    oracle->add_option("--states", oracle_states, "random states to check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kInvalid;
    }

    try {
        if (*analyze) return cmd_analyze(g);
        if (*assign) return cmd_assign(g);
        if (*simulate) return cmd_simulate(g);
        if (*batch) return cmd_batch(g, b);
        if (*timing) return cmd_timing(g, tp);
        if (*oracle) return cmd_oracle(g, oracle_states);
    } catch (const pdl::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const pdl::OracleSizeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::logic_error& e) {
        std::cerr << "check failed: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kInvalid;
}
