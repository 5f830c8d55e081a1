#include "noslip/cli/app.hpp"

#include "noslip/cli/experiments.hpp"
#include "noslip/cli/output.hpp"
#include "noslip/parallel.hpp"
#include "noslip/tables.hpp"
#include "noslip/verification.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <ostream>

namespace noslip::cli {

namespace {

using nlohmann::json;

Section options_for(const RunConfig& cfg, const std::string& name) {
    const YAML::Node n = cfg.root[name];
    return n ? Section(n, name) : Section(YAML::Node(YAML::NodeType::Map), name);
}

unsigned workers() { return static_cast<unsigned>(workers_from_env()); }

std::vector<State> require_starts(const RunConfig& cfg) {
    std::vector<State> starts = cfg.initial_states();
    if (starts.empty())
        throw ConfigError("initial", "no initial states; give initial.states, initial.random or initial.from_csv");
    return starts;
}

std::string indexed(const std::string& stem, std::size_t i, std::size_t n) {
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    std::string num = std::to_string(i);
    return stem + "_" + std::string(width - num.size(), '0') + num + ".csv";
}

std::vector<TrajectoryRecord> run_orbits(const RunConfig& cfg, const std::vector<State>& starts) {
    std::vector<TrajectoryRecord> recs(starts.size());
    const CollisionModel model = cfg.model();
    parallel_for(starts.size(), workers(), [&](std::size_t i) {
        recs[i] = trajectory(*cfg.table, model, starts[i], cfg.collisions);
    });
    return recs;
}

json termination_counts(const std::vector<TrajectoryRecord>& recs) {
    std::map<std::string, std::size_t> counts;
    for (const TrajectoryRecord& r : recs) ++counts[std::string(to_string(r.termination))];
    return counts;
}

int run_simulate(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    const bool write_orbits = opt.flag("trajectories", true);
    const bool svg = opt.flag("svg", true);
    const long svg_orbits = opt.integer("svg_orbits", 20);
    const double tol = opt.number("period_tol", 1e-6);
    opt.finish();

    const std::vector<State> starts = require_starts(cfg);
    const std::vector<TrajectoryRecord> recs = run_orbits(cfg, starts);
    std::vector<std::optional<std::size_t>> periods(recs.size());
    parallel_for(recs.size(), workers(), [&](std::size_t i) {
        if (recs[i].termination == Termination::Completed)
            periods[i] = detect_period(recs[i], tol, cfg.length_scale);
    });

    json artifacts = json::array();
    const std::size_t n = recs.size();
    if (write_orbits) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::string name = indexed("trajectory", i, n);
            write_file(cfg.output_dir / name, trajectory_csv(recs[i]));
            artifacts.push_back(name);
        }
    }
    std::string summary = "orbit,termination,collisions,period\n";
    std::map<std::string, std::size_t> histogram;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string p = periods[i] ? std::to_string(*periods[i]) : "";
        summary += std::to_string(i) + "," + std::string(to_string(recs[i].termination)) + "," +
                   std::to_string(recs[i].flight_times.size()) + "," + p + "\n";
        if (recs[i].termination == Termination::Completed) ++histogram[p.empty() ? "none" : p];
    }
    write_file(cfg.output_dir / "summary.csv", summary);
    artifacts.push_back("summary.csv");
    if (svg) {
        const std::size_t k = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(0L, svg_orbits)));
        const std::vector<TrajectoryRecord> shown(recs.begin(), recs.begin() + k);
        write_file(cfg.output_dir / "trajectory.svg", trajectory_svg(*cfg.table, shown));
        artifacts.push_back("trajectory.svg");
    }
    out << json{{"subcommand", "simulate"},
                {"orbits", n},
                {"terminations", termination_counts(recs)},
                {"periods_of_completed", histogram},
                {"artifacts", artifacts}}
               .dump(2)
        << "\n";
    return kExitOk;
}

int run_portrait(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    const long max_points = opt.integer("svg_max_points", 200000);
    const std::string title = opt.text("title", "velocity phase portrait");
    opt.finish();
    if (max_points < 1) opt.fail("svg_max_points", "must be positive");

    const std::vector<TrajectoryRecord> recs = run_orbits(cfg, require_starts(cfg));
    std::vector<PortraitPoint> pts;
    for (std::size_t i = 0; i < recs.size(); ++i)
        for (const State& s : recs[i].states) {
            const Vec2 u = velocity_coords(s);
            pts.push_back({u.x(), u.y(), i});
        }
    write_file(cfg.output_dir / "portrait.csv", portrait_csv(pts));
    // Thin by a fixed stride so the SVG stays viewable; the CSV keeps everything.
    const std::size_t stride = (pts.size() + max_points - 1) / static_cast<std::size_t>(max_points);
    std::vector<PortraitPoint> shown;
    for (std::size_t k = 0; k < pts.size(); k += std::max<std::size_t>(stride, 1)) shown.push_back(pts[k]);
    write_file(cfg.output_dir / "portrait.svg", portrait_svg(shown, title));
    out << json{{"subcommand", "portrait"},
                {"orbits", recs.size()},
                {"points", pts.size()},
                {"svg_points", shown.size()},
                {"terminations", termination_counts(recs)},
                {"artifacts", json::array({"portrait.csv", "portrait.svg"})}}
               .dump(2)
        << "\n";
    return kExitOk;
}

double arc_radius(const Table& t, std::size_t piece) {
    const auto* arc = std::get_if<Arc>(&t.piece(piece).shape());
    if (!arc) throw std::runtime_error("piece " + std::to_string(piece) + " is not an arc");
    return arc->radius;
}

// A period-2 state for the built-in families that have an obvious one.
std::optional<State> known_period2_state(const RunConfig& cfg) {
    const Table& t = *cfg.table;
    const std::string& type = cfg.table_type;
    auto mid = [&](std::size_t i) { return frame_at(t, i, 0.5 * t.piece(i).length()); };
    if (type == "sinai") return sinai_period2_state(t, cfg.mass, arc_radius(t, 0), 0.0);
    if (type == "wedge") {
        const double L = t.piece(0).length();
        return period2_state(cfg.mass, frame_at(t, 0, 0.1 * L), frame_at(t, 1, 0.9 * L));
    }
    if (type == "strip" || type == "two_arc_lens") return period2_state(cfg.mass, mid(0), mid(1));
    if (type == "regular_polygon" && t.pieces().size() % 2 == 0)
        return period2_state(cfg.mass, mid(0), mid(t.pieces().size() / 2));
    return std::nullopt;
}

int run_stability(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    const std::string family = opt.text("family");
    const double phi = opt.number("phi", 0.0);
    json j;
    if (family == "sinai") {
        const double R = opt.number("radius");
        const double px = opt.number("period", 1.0);
        opt.finish();
        const StabilityReport r = sinai_report(cfg.mass, R, phi, px);
        j = to_json(r);
        const Table t = tables::sinai(R, px, px);
        j["simulated_trace"] = period2_product(t, cfg.mass, sinai_period2_state(t, cfg.mass, R, phi)).trace();
        j["radius"] = R;
    } else if (family == "chord") {
        const double d = opt.number("d_bar");
        const double kq = opt.number("kappa_q");
        const double kt = opt.number("kappa_qt");
        opt.finish();
        StabilityReport r = make_report(trace_T2(cfg.mass, phi, d, kq, kt));
        Thresholds th;
        th.zeta = kq * d;
        th.zeta0 = critical_zeta(cfg.mass, phi, CurvatureSign::Positive);
        th.critical_radius = std::nan("");
        r.thresholds = th;
        j = to_json(r);
        j["d_bar"] = d;
    } else if (family == "orbit") {
        const double tol = opt.number("period_tol", 1e-9);
        opt.finish();
        const State xi = require_starts(cfg).front();
        const Step a = billiard_map(*cfg.table, cfg.mass, xi);
        const Step b = billiard_map(*cfg.table, cfg.mass, a.state);
        const double gap = state_distance(b.state, xi, cfg.length_scale);
        if (!(gap < tol))
            throw std::runtime_error("initial state is not period 2 (gap " + fmt6(gap) + ")");
        const Mat4 M = period2_product(*cfg.table, cfg.mass, xi);
        j = to_json(make_report(M.trace()));
        j["eigen_structure"] = to_json(check_eigen_structure(M));
    } else {
        opt.fail("family", "expected sinai, chord or orbit");
    }
    j["family"] = family;
    j["phi"] = phi;
    write_file(cfg.output_dir / "stability.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
    return kExitOk;
}

// Bisects a class change between a and b; cls(a) != cls(b).
double bisect_class(const std::function<StabilityClass(double)>& cls, double a, double b) {
    const StabilityClass ca = cls(a);
    for (int k = 0; k < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++k) {
        const double m = 0.5 * (a + b);
        if (cls(m) == ca) a = m;
        else b = m;
    }
    return 0.5 * (a + b);
}

int run_sweep(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    const std::string family = opt.text("family");
    const double phi = opt.number("phi", 0.0);
    const double from = opt.number("from");
    const double to = opt.number("to");
    const long count = opt.integer("count", 61);
    const bool bisect = opt.flag("bisect", true);
    opt.finish();
    if (count < 2) opt.fail("count", "need at least two grid points");

    std::function<double(double)> trace;
    double analytic = 0.0;
    if (family == "sinai") {
        trace = [&](double R) { return sinai_trace(cfg.mass, R, phi); };
        analytic = sinai_critical_radius(cfg.mass, phi);
    } else if (family == "zeta") {
        trace = [&](double z) { return trace_T2(cfg.mass, phi, 1.0, z, z); };
        analytic = critical_zeta(cfg.mass, phi, CurvatureSign::Positive);
    } else {
        opt.fail("family", "expected sinai or zeta");
    }
    const auto cls = [&](double x) { return classify(trace(x)); };

    const std::size_t n = static_cast<std::size_t>(count);
    std::vector<double> xs(n), tr(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = from + (to - from) * static_cast<double>(i) / (n - 1);
    parallel_for(n, workers(), [&](std::size_t i) { tr[i] = trace(xs[i]); });

    std::string csv = "value,trace,class\n";
    json transitions = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        csv += fmt17(xs[i]) + "," + fmt17(tr[i]) + "," + std::string(to_string(classify(tr[i]))) + "\n";
        if (i > 0 && classify(tr[i]) != classify(tr[i - 1])) {
            json t = {{"from", to_string(classify(tr[i - 1]))},
                      {"to", to_string(classify(tr[i]))},
                      {"between", {xs[i - 1], xs[i]}}};
            if (bisect) t["bisected"] = bisect_class(cls, xs[i - 1], xs[i]);
            transitions.push_back(t);
        }
    }
    write_file(cfg.output_dir / "sweep.csv", csv);
    const json j = {{"subcommand", "sweep"},
                    {"family", family},
                    {"phi", phi},
                    {"points", n},
                    {"transitions", transitions},
                    {family == "sinai" ? "analytic_critical_radius" : "analytic_zeta0", analytic},
                    {"artifacts", json::array({"sweep.csv", "sweep.json"})}};
    write_file(cfg.output_dir / "sweep.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
    return kExitOk;
}

int run_wedge(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    const long q_max = opt.integer("q_max", 7);
    const bool simulate = opt.flag("simulate", true);
    const double psi = opt.number("psi", 1e-2);
    const double varphi = opt.number("varphi", 0.3);
    std::vector<double> x0{0.05, 0.02};
    if (opt.has("x")) x0 = opt.numbers("x");
    if (x0.size() != 2) opt.fail("x", "expected [x1, x2]");
    const double tol = opt.number("period_tol", 1e-6);
    std::vector<double> betas, phis;
    if (opt.has("grid")) {
        const Section g = opt.child("grid");
        betas = g.has("beta") ? g.numbers("beta") : std::vector<double>{cfg.mass.beta};
        phis = g.numbers("phi");
        g.finish();
    }
    opt.finish();
    if (q_max < 2) opt.fail("q_max", "must be at least 2");

    struct Row {
        std::string p, q, branch;
        MassParams mass;
        double phi = 0.0, theta = 0.0;
        std::size_t predicted = 0;
        std::optional<std::size_t> period;
    };
    std::vector<Row> rows;
    for (long q = 2; q <= q_max; ++q)
        for (long p = 1; p < q; ++p) {
            if (std::gcd(p, q) != 1) continue;
            for (Branch b : {Branch::Lower, Branch::Upper}) {
                try {
                    Row r;
                    r.p = std::to_string(p);
                    r.q = std::to_string(q);
                    r.branch = std::string(to_string(b));
                    r.mass = cfg.mass;
                    r.phi = phi_for_period(cfg.mass, static_cast<int>(p), static_cast<int>(q), b);
                    r.predicted = static_cast<std::size_t>(2 * q);
                    rows.push_back(r);
                } catch (const std::domain_error&) {
                }
            }
        }
    for (double beta : betas)
        for (double ph : phis) {
            Row r;
            r.mass = MassParams::from_beta(beta);
            r.phi = ph;
            rows.push_back(r);
        }

    const std::size_t sim_len = std::max<std::size_t>(cfg.collisions, 8 * static_cast<std::size_t>(q_max));
    parallel_for(rows.size(), workers(), [&](std::size_t i) {
        Row& r = rows[i];
        r.theta = rotation_angle(WedgeParams(r.phi, r.mass));
        if (simulate) {
            try {
                r.period = wedge_orbit_period(r.mass, r.phi, {x0[0], x0[1]}, varphi, psi, sim_len, tol).period;
            } catch (const std::exception&) {
            }
        } else if (r.predicted) {
            r.period = r.predicted;
        }
    });

    std::string csv = "p,q,branch,phi,theta,period\n";
    std::size_t matched = 0, rational = 0;
    for (const Row& r : rows) {
        csv += r.p + "," + r.q + "," + r.branch + "," + fmt17(r.phi) + "," + fmt17(r.theta) + "," +
               (r.period ? std::to_string(*r.period) : "") + "\n";
        if (r.predicted) {
            ++rational;
            if (r.period && *r.period == r.predicted) ++matched;
        }
    }
    write_file(cfg.output_dir / "wedge_catalog.csv", csv);
    out << json{{"subcommand", "wedge"},
                {"rows", rows.size()},
                {"rational_rows", rational},
                {"period_2q_confirmed", matched},
                {"simulated", simulate},
                {"artifacts", json::array({"wedge_catalog.csv"})}}
               .dump(2)
        << "\n";
    return kExitOk;
}

int run_verify(const RunConfig& cfg, const Section& opt, std::ostream& out) {
    SampleOptions so;
    so.samples = static_cast<std::size_t>(opt.integer("samples", 1000));
    so.seed = cfg.seed;
    so.workers = workers();
    const double fd_step = opt.number("fd_step", 1e-6);
    const double rev_tol = opt.number("reversibility_tol", 1e-9);
    const double measure_tol = opt.number("measure_tol", 1e-5);
    const double energy_tol = opt.number("energy_tol", 1e-9);
    const double eigen_tol = opt.number("eigen_tol", 1e-8);
    const double cob_tol = opt.number("coboundary_tol", 1e-10);
    const bool negative = opt.flag("negative_control", true);
    opt.finish();

    const CollisionModel model = cfg.model();
    json checks = json::array();
    bool all = true;
    auto add = [&](const CheckReport& r) {
        checks.push_back(to_json(r));
        all = all && r.pass;
    };
    add(check_reversibility(*cfg.table, model, so, rev_tol));
    add(check_measure_invariance(*cfg.table, model, so, fd_step, measure_tol));

    std::vector<State> starts = cfg.initial_states();
    if (starts.empty()) {
        Rng rng(cfg.seed);
        starts.push_back(random_state(*cfg.table, rng));
    }
    add(check_energy(trajectory(*cfg.table, model, starts.front(), cfg.collisions), energy_tol));

    if (!cfg.specular) {
        if (const auto xi = known_period2_state(cfg)) {
            CheckReport r = check_eigen_structure(period2_product(*cfg.table, cfg.mass, *xi), eigen_tol);
            add(r);
        }
    }
    if (cfg.table_type == "wedge" && !cfg.specular) {
        const double phi = cfg.root["table"]["phi"].as<double>();
        for (double r : {1e-3, 1e-2}) add(check_coboundary(WedgeParams(phi, cfg.mass), r, 1000, cob_tol));
    }
    if (negative) {
        // One flipped sign in the no-slip matrix must break reversibility.
        Mat3 bad = noslip_matrix(cfg.mass);
        bad(0, 1) = -bad(0, 1);
        SampleOptions small = so;
        small.samples = std::min<std::size_t>(so.samples, 100);
        CheckReport r = check_reversibility(*cfg.table, CollisionModel::custom(bad), small, rev_tol);
        r.check_name = "negative_control";
        r.details = "corrupted wall matrix; passes when the reversibility check fails";
        r.pass = !r.pass && r.samples > 0;
        add(r);
    }

    const json j = {{"subcommand", "verify"}, {"table", cfg.table_type}, {"pass", all}, {"checks", checks}};
    write_file(cfg.output_dir / "verify.json", j.dump(2) + "\n");
    out << j.dump(2) << "\n";
    return all ? kExitOk : kExitCheckFailed;
}

json error_record(const std::string& kind, const std::string& message, const std::string& field = "",
                  int line = 0, int column = 0) {
    json e = {{"kind", kind}, {"message", message}};
    if (!field.empty()) e["field"] = field;
    if (line > 0) {
        e["line"] = line;
        e["column"] = column;
    }
    return {{"error", e}};
}

}  // namespace

int run(const std::string& subcommand, const RunConfig& cfg, std::ostream& out) {
    const Section opt = options_for(cfg, subcommand);
    if (subcommand == "simulate") return run_simulate(cfg, opt, out);
    if (subcommand == "portrait") return run_portrait(cfg, opt, out);
    if (subcommand == "stability") return run_stability(cfg, opt, out);
    if (subcommand == "sweep") return run_sweep(cfg, opt, out);
    if (subcommand == "wedge") return run_wedge(cfg, opt, out);
    if (subcommand == "verify") return run_verify(cfg, opt, out);
    throw ConfigError("", "unknown subcommand '" + subcommand + "'");
}

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"No-slip billiard simulator"};
    std::string subcommand;
    std::string config;
    std::vector<std::string> overrides;
    app.add_option("subcommand", subcommand, "simulate | portrait | stability | wedge | sweep | verify")
        ->required()
        ->check(CLI::IsMember({"simulate", "portrait", "stability", "wedge", "sweep", "verify"}));
    app.add_option("config", config, "YAML run configuration")->required();
    app.add_option("--set", overrides, "Override a scalar config field, key.path=value")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
        ->expected(1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << error_record("usage", e.what()).dump() << "\n";
        return kExitConfig;
    }

    try {
        const RunConfig cfg = load_config(config, overrides);
        return run(subcommand, cfg, out);
    } catch (const ConfigError& e) {
        err << error_record("config", e.what(), e.field(), e.line(), e.column()).dump() << "\n";
        return kExitConfig;
    } catch (const YAML::Exception& e) {
        err << error_record("config", e.what(), "", e.mark.line + 1, e.mark.column + 1).dump() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        err << error_record("runtime", e.what()).dump() << "\n";
        return kExitRuntime;
    }
}

}  // namespace noslip::cli
