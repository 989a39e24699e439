#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"

#include "pdl/scenario.hpp"

namespace pdl {

struct PolicyPair {
    DefenderPolicy defender = DefenderPolicy::lgr;
    IntruderPolicy intruder = IntruderPolicy::optimal;

    std::string name() const { return std::string(to_string(defender)) + ":" + to_string(intruder); }
};

inline PolicyPair parse_policy_pair(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ValidationError("policy pair must look like lgr:optimal");
    return {parse_defender_policy(s.substr(0, colon)), parse_intruder_policy(s.substr(colon + 1))};
}

struct StatsRecord {
    std::uint64_t digest = 0;
    int trial = 0;
    int n_d = 0, n_a = 0;
    double nu = 0.0, r = 0.0;
    int q_lg = 0, q_mm = 0;
    std::optional<int> q_mis;
    // milliseconds
    double t_removal = 0.0, t_assign_2v1 = 0.0, t_assign_1v1 = 0.0, t_mm = 0.0, t_mis = 0.0;
    std::vector<std::pair<std::string, int>> simulated;
};

struct CellSummary {
    int n_d = 0, n_a = 0;
    double r = 0.0;
    int trials = 0;
    double mean_lg = 0, mean_mm = 0, mean_mis = 0;
    int min_lg = 0, max_lg = 0, min_mm = 0, max_mm = 0, min_mis = 0, max_mis = 0;
    int mis_trials = 0;
    double frac_mis_above_lg = 0.0;
};

struct BatchParams {
    ScenarioSpec base;            // perimeter, speeds, placement; counts are overwritten
    std::vector<int> defenders;   // N_D per cell
    int intruder_gap = 1;         // N_A = N_D - gap
    std::vector<double> distances;
    int trials = 0;
    std::uint64_t seed = 0;
    bool with_mis = false;
    std::vector<PolicyPair> simulate;
};

struct BatchResult {
    std::vector<StatsRecord> records;
    std::vector<CellSummary> cells;
};

// Scores at t=0 and whether the residual game after removal sits inside the
// proven regime (no positive region left and every q_hat at most one).
struct InitialAnalysis {
    int q_lg = 0;
    std::vector<int> g_star;  // region ids
    std::vector<int> removed;
    int residual_q_lg = 0;
    int residual_max_q_hat = 0;

    bool envelope() const { return residual_q_lg == 0 && residual_max_q_hat <= 1; }
};

inline InitialAnalysis analyze_initial(const Arena& arena, const GameState& state) {
    InitialAnalysis out;
    {
        TeamSnapshot snap(arena, state);
        const PartitionResult p = q_lg(snap, snap.unremoved());
        out.q_lg = p.q_lg;
        out.g_star = p.g_star;
        out.removed = remove_uncapturable(snap);
    }
    GameState residual = state;
    for (int id : out.removed) residual.intruders[static_cast<std::size_t>(id)].removed = true;
    TeamSnapshot snap(arena, residual);
    out.residual_q_lg = q_lg_value(snap, snap.unremoved());
    out.residual_max_q_hat = monitor_values(snap, nullptr).max_q_hat;
    return out;
}

inline int worker_count() {
    if (const char* env = std::getenv("PDL_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// runs job(i) for i in [0, n) on up to `threads` workers; results land by index
template <class Job>
void parallel_for(int n, int threads, Job job) {
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        for (int i = 0; i < n; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n && !failed; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace detail {

// CPU time of the calling thread in ms; wall time on a shared core picks up
// preemption, which swamps microsecond calls
struct Clock {
    static double now() {
        timespec ts{};
        clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
        return 1e3 * static_cast<double>(ts.tv_sec) + 1e-6 * static_cast<double>(ts.tv_nsec);
    }
};

inline double ms_since(double t0) { return Clock::now() - t0; }

inline bool mis_fits(int n_d, int n_a) { return n_d + n_a <= 14; }

}  // namespace detail

// One trial: scores of the three policies and the component runtimes.
inline StatsRecord score_trial(const ScenarioSpec& spec, bool with_mis, const std::vector<PolicyPair>& simulate) {
    using detail::Clock;
    StatsRecord rec;
    rec.digest = scenario_digest(spec);
    Scenario sc = materialize(spec);
    rec.n_d = static_cast<int>(sc.state.defenders.size());
    rec.n_a = static_cast<int>(sc.state.intruders.size());
    rec.nu = sc.arena.speeds.nu();
    rec.r = spec.intruders.distance;

    auto t0 = Clock::now();
    std::vector<int> removed;
    {
        TeamSnapshot snap(sc.arena, sc.state);
        const auto everyone = snap.unremoved();
        rec.q_lg = q_lg_value(snap, everyone);
        removed = remove_uncapturable(snap);
        rec.t_removal = detail::ms_since(t0);

        t0 = Clock::now();
        rec.q_mm = mm_assignment(snap, everyone).q_mm;
        rec.t_mm = detail::ms_since(t0);
        if (with_mis && detail::mis_fits(rec.n_d, rec.n_a)) {
            t0 = Clock::now();
            rec.q_mis = mis_assignment(snap, everyone);
            rec.t_mis = detail::ms_since(t0);
        }
    }
    GameState residual = sc.state;
    for (int id : removed) residual.intruders[static_cast<std::size_t>(id)].removed = true;
    {
        t0 = Clock::now();
        TeamSnapshot snap(sc.arena, residual);
        const auto two = assign_2v1(snap, snap.unremoved(), false);
        rec.t_assign_2v1 = detail::ms_since(t0);
        t0 = Clock::now();
        assign_1v1(snap, snap.unremoved(), two.entries, two.one_v_one_defenders);
        rec.t_assign_1v1 = detail::ms_since(t0);
    }
    const bool ordered = rec.q_lg <= rec.q_mm && (!rec.q_mis || (rec.q_lg <= *rec.q_mis && *rec.q_mis <= rec.q_mm));
    if (!ordered)
        throw std::logic_error("score ordering violated: q_lg=" + std::to_string(rec.q_lg) + " q_mis=" +
                               (rec.q_mis ? std::to_string(*rec.q_mis) : std::string("-")) +
                               " q_mm=" + std::to_string(rec.q_mm) + " scenario=" + to_json(spec).dump());
    for (const auto& p : simulate) {
        RunOptions opt;
        opt.defender = p.defender;
        opt.intruder = p.intruder;
        opt.seed = spec.seed;
        opt.dt = sc.dt;
        opt.max_time = sc.max_time;
        rec.simulated.push_back({p.name(), run(sc.arena, sc.state, opt).score});
    }
    return rec;
}

inline ScenarioSpec trial_spec(const BatchParams& p, int n_d, double r, std::uint64_t seed) {
    ScenarioSpec s = p.base;
    s.defenders.positions.clear();
    s.defenders.count = n_d;
    s.intruders.points.clear();
    s.intruders.count = n_d - p.intruder_gap;
    s.intruders.distance = r;
    return generate_scenario(s, seed);
}

// Grid over (N_D, distance) cells; trial seeds come from the cell and trial
// index alone so results do not depend on scheduling.
inline BatchResult batch_scores(const BatchParams& p) {
    if (p.trials < 0) throw ValidationError("trials must be non-negative");
    if (p.intruder_gap < 1) throw ValidationError("need fewer intruders than defenders");
    for (double r : p.distances)
        if (!(r > 0.0)) throw ValidationError("intruder distance must be positive");
    BatchResult out;
    struct Job {
        int n_d;
        double r;
        int trial;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    std::uint64_t cell = 0;
    for (int n_d : p.defenders)
        for (double r : p.distances) {
            for (int t = 0; t < p.trials; ++t) jobs.push_back({n_d, r, t, split_seed(split_seed(p.seed, cell), static_cast<std::uint64_t>(t))});
            ++cell;
        }
    out.records.resize(jobs.size());
    parallel_for(static_cast<int>(jobs.size()), worker_count(), [&](int i) {
        const Job& j = jobs[static_cast<std::size_t>(i)];
        StatsRecord rec = score_trial(trial_spec(p, j.n_d, j.r, j.seed), p.with_mis, p.simulate);
        rec.trial = j.trial;
        out.records[static_cast<std::size_t>(i)] = std::move(rec);
    });
    std::size_t at = 0;
    for (int n_d : p.defenders)
        for (double r : p.distances) {
            CellSummary c;
            c.n_d = n_d;
            c.n_a = n_d - p.intruder_gap;
            c.r = r;
            c.trials = p.trials;
            int above = 0;
            for (int t = 0; t < p.trials; ++t, ++at) {
                const auto& rec = out.records[at];
                c.mean_lg += rec.q_lg;
                c.mean_mm += rec.q_mm;
                c.min_lg = t == 0 ? rec.q_lg : std::min(c.min_lg, rec.q_lg);
                c.max_lg = t == 0 ? rec.q_lg : std::max(c.max_lg, rec.q_lg);
                c.min_mm = t == 0 ? rec.q_mm : std::min(c.min_mm, rec.q_mm);
                c.max_mm = t == 0 ? rec.q_mm : std::max(c.max_mm, rec.q_mm);
                if (rec.q_mis) {
                    c.min_mis = c.mis_trials == 0 ? *rec.q_mis : std::min(c.min_mis, *rec.q_mis);
                    c.max_mis = c.mis_trials == 0 ? *rec.q_mis : std::max(c.max_mis, *rec.q_mis);
                    c.mean_mis += *rec.q_mis;
                    ++c.mis_trials;
                    above += *rec.q_mis > rec.q_lg ? 1 : 0;
                }
            }
            if (c.trials > 0) {
                c.mean_lg /= c.trials;
                c.mean_mm /= c.trials;
            }
            if (c.mis_trials > 0) {
                c.mean_mis /= c.mis_trials;
                c.frac_mis_above_lg = static_cast<double>(above) / c.mis_trials;
            }
            out.cells.push_back(c);
        }
    return out;
}

inline void write_records_csv(std::ostream& os, const BatchResult& b, const std::vector<PolicyPair>& simulate) {
    os << "digest,trial,n_d,n_a,nu,r,q_lg,q_mm,q_mis,t_removal_ms,t_assign_2v1_ms,t_assign_1v1_ms,t_mm_ms,t_mis_ms";
    for (const auto& p : simulate) os << ",q_sim_" << p.name();
    os << '\n';
    for (const auto& r : b.records) {
        char digest[32];
        std::snprintf(digest, sizeof digest, "%016llx", static_cast<unsigned long long>(r.digest));
        os << digest << ',' << r.trial << ',' << r.n_d << ',' << r.n_a << ',' << r.nu << ',' << r.r << ',' << r.q_lg << ','
           << r.q_mm << ',' << (r.q_mis ? std::to_string(*r.q_mis) : std::string()) << ',' << r.t_removal << ','
           << r.t_assign_2v1 << ',' << r.t_assign_1v1 << ',' << r.t_mm << ',' ;
        if (r.q_mis) os << r.t_mis;
        for (const auto& s : r.simulated) os << ',' << s.second;
        os << '\n';
    }
}

inline void write_cells_csv(std::ostream& os, const BatchResult& b) {
    os << "n_d,n_a,r,trials,mean_q_lg,min_q_lg,max_q_lg,mean_q_mm,min_q_mm,max_q_mm,mis_trials,mean_q_mis,min_q_mis,max_q_mis,"
          "frac_mis_above_lg\n";
    for (const auto& c : b.cells) {
        os << c.n_d << ',' << c.n_a << ',' << c.r << ',' << c.trials << ',' << c.mean_lg << ',' << c.min_lg << ',' << c.max_lg
           << ',' << c.mean_mm << ',' << c.min_mm << ',' << c.max_mm << ',' << c.mis_trials << ',';
        if (c.mis_trials > 0) os << c.mean_mis << ',' << c.min_mis << ',' << c.max_mis << ',' << c.frac_mis_above_lg;
        else os << ",,,";
        os << '\n';
    }
}

inline nlohmann::json to_json(const BatchResult& b) {
    nlohmann::json j;
    j["records"] = nlohmann::json::array();
    for (const auto& r : b.records) {
        nlohmann::json x{{"digest", r.digest}, {"trial", r.trial}, {"n_d", r.n_d}, {"n_a", r.n_a}, {"nu", r.nu}, {"r", r.r},
                         {"q_lg", r.q_lg}, {"q_mm", r.q_mm},
                         {"runtimes_ms", {{"removal", r.t_removal}, {"assign_2v1", r.t_assign_2v1}, {"assign_1v1", r.t_assign_1v1}, {"mm", r.t_mm}}}};
        if (r.q_mis) {
            x["q_mis"] = *r.q_mis;
            x["runtimes_ms"]["mis"] = r.t_mis;
        }
        for (const auto& s : r.simulated) x["simulated"][s.first] = s.second;
        j["records"].push_back(x);
    }
    j["cells"] = nlohmann::json::array();
    for (const auto& c : b.cells) {
        nlohmann::json x{{"n_d", c.n_d}, {"n_a", c.n_a}, {"r", c.r}, {"trials", c.trials},
                         {"q_lg", {{"mean", c.mean_lg}, {"min", c.min_lg}, {"max", c.max_lg}}},
                         {"q_mm", {{"mean", c.mean_mm}, {"min", c.min_mm}, {"max", c.max_mm}}}};
        if (c.mis_trials > 0) {
            x["q_mis"] = {{"mean", c.mean_mis}, {"min", c.min_mis}, {"max", c.max_mis}};
            x["frac_mis_above_lg"] = c.frac_mis_above_lg;
        }
        j["cells"].push_back(x);
    }
    return j;
}

// ---- runtime scaling ----

struct TimingRow {
    int n_a = 0, n_d = 0;
    std::string component;  // removal | assignment | mm | mis
    double median_ms = 0.0;
    int samples = 0;
};

struct TimingResult {
    std::vector<TimingRow> rows;
    std::vector<std::pair<std::string, double>> slopes;  // log-log least squares per component
    std::vector<std::string> notices;

    double slope(const std::string& component) const {
        for (const auto& s : slopes)
            if (s.first == component) return s.second;
        return std::nan("");
    }

    std::vector<double> medians(const std::string& component) const {
        std::vector<double> m;
        for (const auto& r : rows)
            if (r.component == component) m.push_back(r.median_ms);
        return m;
    }
};

struct TimingParams {
    std::vector<int> sizes{4, 8, 12, 16, 20, 24};  // N_A; N_D = N_A + 1
    std::vector<int> mis_sizes;                    // empty: same as sizes, skipping those above the guard
    int trials = 15;
    std::uint64_t seed = 0;
    double nu = 1.0;
    double min_sample_ms = 5.0;  // repeat fast calls until this much wall time
    double distance = 0.0;       // intruder offset; 0: half the defender spacing
    double mis_distance = 0.0;   // offset for the MIS instances; 0: same as distance
};

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2) return std::nan("");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    }
    return sxy / sxx;
}

namespace detail {

inline double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// per-call wall time, repeating until the batch is long enough to time
template <class F>
double time_call(F&& f, double min_ms) {
    int reps = 0;
    const auto t0 = Clock::now();
    double el = 0.0;
    do {
        f();
        ++reps;
        el = ms_since(t0);
    } while (el < min_ms);
    return el / reps;
}

inline Scenario timing_instance(const TimingParams& p, int n_a, int trial, double distance) {
    ScenarioSpec s;
    s.nu = p.nu;
    s.defenders.count = n_a + 1;
    s.defenders.placement = "uniform";
    s.intruders.count = n_a;
    // default: half the defender spacing on the unit circle
    s.intruders.distance = distance > 0.0 ? distance : std::numbers::pi / (n_a + 1);
    return materialize(generate_scenario(s, split_seed(split_seed(p.seed, static_cast<std::uint64_t>(n_a)), static_cast<std::uint64_t>(trial))));
}

}  // namespace detail

// Single threaded on purpose.
inline TimingResult timing_experiment(const TimingParams& p) {
    TimingResult out;
    std::vector<double> xs;
    std::vector<std::vector<double>> per(3);
    const char* names[3] = {"removal", "assignment", "mm"};
    for (int n_a : p.sizes) {
        std::vector<std::vector<double>> samples(3);
        for (int t = 0; t < p.trials; ++t) {
            Scenario sc = detail::timing_instance(p, n_a, t, p.distance);
            samples[0].push_back(detail::time_call(
                [&] {
                    TeamSnapshot snap(sc.arena, sc.state);
                    volatile std::size_t n = remove_uncapturable(snap).size();
                    (void)n;
                },
                p.min_sample_ms));
            std::vector<int> removed;
            {
                TeamSnapshot snap(sc.arena, sc.state);
                removed = remove_uncapturable(snap);
            }
            GameState residual = sc.state;
            for (int id : removed) residual.intruders[static_cast<std::size_t>(id)].removed = true;
            samples[1].push_back(detail::time_call(
                [&] {
                    TeamSnapshot snap(sc.arena, residual);
                    volatile std::size_t n = lgr_assign(snap, false).one_v_one.size();
                    (void)n;
                },
                p.min_sample_ms));
            samples[2].push_back(detail::time_call(
                [&] {
                    TeamSnapshot snap(sc.arena, sc.state);
                    volatile int q = mm_assignment(snap, snap.unremoved()).q_mm;
                    (void)q;
                },
                p.min_sample_ms));
        }
        xs.push_back(n_a);
        for (int c = 0; c < 3; ++c) {
            const double m = detail::median(samples[c]);
            per[c].push_back(m);
            out.rows.push_back({n_a, n_a + 1, names[c], m, p.trials});
        }
    }
    for (int c = 0; c < 3; ++c) out.slopes.push_back({names[c], loglog_slope(xs, per[c])});

    // the exhaustive baseline; the snapshot is built outside the timed call
    std::vector<double> mx, my;
    for (int n_a : p.mis_sizes.empty() ? p.sizes : p.mis_sizes) {
        if (!detail::mis_fits(n_a + 1, n_a)) {
            out.notices.push_back("MIS skipped for N_A=" + std::to_string(n_a) + ": above the size guard");
            continue;
        }
        std::vector<double> samples;
        for (int t = 0; t < p.trials; ++t) {
            Scenario sc = detail::timing_instance(p, n_a, t, p.mis_distance > 0.0 ? p.mis_distance : p.distance);
            TeamSnapshot snap(sc.arena, sc.state);
            const auto everyone = snap.unremoved();
            samples.push_back(detail::time_call(
                [&] {
                    volatile int q = mis_assignment(snap, everyone);
                    (void)q;
                },
                p.min_sample_ms));
        }
        const double m = detail::median(samples);
        out.rows.push_back({n_a, n_a + 1, "mis", m, p.trials});
        mx.push_back(n_a);
        my.push_back(m);
    }
    out.slopes.push_back({"mis", loglog_slope(mx, my)});
    return out;
}

inline void write_timing_csv(std::ostream& os, const TimingResult& t) {
    os << "component,n_a,n_d,median_ms,samples\n";
    for (const auto& r : t.rows) os << r.component << ',' << r.n_a << ',' << r.n_d << ',' << r.median_ms << ',' << r.samples << '\n';
}

// ---- oracle cross-checks ----

struct OracleReport {
    int states = 0;
    int dp_mismatches = 0;
    int removal_failures = 0;
    int membership_checks = 0;
    int membership_unstable = 0;
    std::vector<std::string> failures;

    bool ok() const { return dp_mismatches == 0 && removal_failures == 0 && membership_unstable == 0; }
};

// Built-in grid: random states on the unit circle and a square, N_D in 2..6.
inline OracleReport run_oracles(std::uint64_t seed, int states = 300) {
    OracleReport rep;
    std::mt19937_64 rng(split_seed(seed, 0x0ac1e));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double nus[3] = {0.5, 0.8, 1.0};
    const std::vector<Vec2> square{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    for (int i = 0; i < states; ++i) {
        const bool circle = i % 4 != 3;
        const Perimeter per = circle ? Perimeter::circle(1.0) : Perimeter::polygon(square);
        const Arena arena{per, SpeedModel::from_ratio(1.0, nus[i % 3])};
        const int n_d = 2 + static_cast<int>(rng() % 5);
        const int n_a = static_cast<int>(rng() % static_cast<std::uint64_t>(n_d));
        std::vector<double> ds;
        std::vector<Vec2> xs;
        for (int d = 0; d < n_d; ++d) ds.push_back(unit(rng) * per.length());
        for (int a = 0; a < n_a; ++a) {
            const double s = unit(rng) * per.length();
            xs.push_back(per.point_at(s) + per.normal_at(s) * (0.02 + 0.6 * unit(rng)));
        }
        GameState g = GameState::from(ds, xs);
        ++rep.states;
        TeamSnapshot snap(arena, g);
        const auto everyone = snap.unremoved();
        const PartitionResult dp = q_lg(snap, everyone);
        const auto regions = snap.tally(everyone);
        const PartitionResult brute = q_lg_bruteforce(per, regions, n_d);
        if (dp.q_lg != brute.q_lg || dp.g_star != brute.g_star) {
            ++rep.dp_mismatches;
            rep.failures.push_back("dp vs brute force at state " + std::to_string(i));
        }
        auto removed = remove_uncapturable(snap);
        std::vector<char> rest = everyone;
        for (int id : removed) rest[static_cast<std::size_t>(snap.intruder_index(id))] = 0;
        if (static_cast<int>(removed.size()) != dp.q_lg || q_lg_value(snap, rest) != 0) {
            ++rep.removal_failures;
            rep.failures.push_back("removal at state " + std::to_string(i));
        }

        // 1v1 membership at twice the sample resolution; a flip is only
        // reported when the margin is clear of the decision threshold
        const Arena fine{per.with_resolution(2 * per.resolution()), arena.speeds};
        for (int a = 0; a < n_a; ++a)
            for (int d = 0; d < n_d; ++d) {
                ++rep.membership_checks;
                const double m = win_margin_1v1(arena, ds[static_cast<std::size_t>(d)], xs[static_cast<std::size_t>(a)], Direction::either);
                if (std::abs(m) <= 1e-6) continue;
                if (in_intruder_win_1v1(arena, ds[static_cast<std::size_t>(d)], xs[static_cast<std::size_t>(a)]) !=
                    in_intruder_win_1v1(fine, ds[static_cast<std::size_t>(d)], xs[static_cast<std::size_t>(a)])) {
                    ++rep.membership_unstable;
                    rep.failures.push_back("membership flips at 2x resolution, state " + std::to_string(i));
                }
            }
    }
    return rep;
}

}  // namespace pdl
