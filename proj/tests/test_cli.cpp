#include <doctest.h>

#include "noslip/cli/app.hpp"
#include "noslip/cli/output.hpp"
#include "noslip/tables.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace noslip;
using namespace noslip::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("noslip_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write_config(const fs::path& dir, const std::string& text) {
    const fs::path p = dir / "run.yaml";
    std::ofstream(p) << text;
    return p;
}

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "noslip");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const char* kTriangle = R"(seed: 9
collisions: 60
table:
  type: regular_polygon
  n: 3
mass:
  gamma: 0.7071067811865476
initial:
  random: 40
output:
  dir: out
)";

ConfigError config_error(const std::string& text) {
    try {
        parse_config(YAML::Load(text));
    } catch (const ConfigError& e) {
        return e;
    }
    FAIL("config was accepted");
    return ConfigError("", "");
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config(YAML::Load(R"(
seed: 4
collisions: 1e3
table: {type: sinai, radius: 0.3, periods: [1, 2]}
mass: {beta: 1.2309594173407747}
collision: specular
initial:
  states:
    - {piece: 0, s: 0.1, u1: 0.2, u2: -0.3}
  random: 2
)"));
    CHECK(cfg.seed == 4);
    CHECK(cfg.collisions == 1000);
    CHECK(cfg.table_type == "sinai");
    CHECK(cfg.table->is_torus());
    CHECK(cfg.length_scale == 2.0);
    CHECK(cfg.specular);
    CHECK(std::cos(cfg.mass.beta) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    const std::vector<State> s = cfg.initial_states();
    REQUIRE(s.size() == 3);
    CHECK(velocity_coords(s[0]).x() == 0.2);
    // Random draws come from the seed alone.
    CHECK(s[1].v == parse_config(cfg.root).initial_states()[1].v);

    const RunConfig lam = parse_config(YAML::Load(
        "seed: 1\ntable: {type: strip, width: 2}\nmass: {lambda: 0.25, radius: 1}\n"));
    CHECK(lam.mass.gamma == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(lam.length_scale == 2.0);

    const RunConfig custom = parse_config(YAML::Load(R"(
seed: 1
mass: {gamma: 0.5}
table:
  type: custom
  pieces:
    - {kind: arc, center: [0.5, 0.5], radius: 0.2, start: 0, end: 6.283185307179586}
  torus: [1, 1]
)"));
    CHECK(custom.table->piece(0).closed());
}

TEST_CASE("config diagnostics") {
    const ConfigError two = config_error("seed: 1\ntable: {type: strip, width: 1}\nmass:\n  gamma: 0.5\n  beta: 1.0\n");
    CHECK(two.field() == "mass");
    CHECK(two.line() == 4);

    const ConfigError unknown = config_error("seed: 1\ntable:\n  type: sinai\n  radius: 0.2\n  radiuss: 0.2\nmass: {gamma: 0.5}\n");
    CHECK(unknown.field() == "table.radiuss");
    CHECK(unknown.line() == 5);
    CHECK(unknown.column() == 3);

    const ConfigError bad = config_error("seed: 1\ntable: {type: strip, width: wide}\nmass: {gamma: 0.5}\n");
    CHECK(bad.field() == "table.width");
    CHECK(bad.line() == 2);

    CHECK(config_error("table: {type: strip, width: 1}\nmass: {gamma: 0.5}\n").field() == "seed");
    CHECK(config_error("seed: 1\ntable: {type: hexagon}\nmass: {gamma: 0.5}\n").field() == "table.type");
    CHECK(config_error("seed: 1\ntable: {type: sinai, radius: 0.7}\nmass: {gamma: 0.5}\n").field() == "table");
    CHECK(config_error("seed: 1\ntable: {type: strip, width: 1}\nmass: {gamma: 0.5}\n"
                       "initial: {states: [{piece: 0, s: 1, u1: 0.9, u2: 0.9}]}\n")
              .field() == "initial.states[0]");
    CHECK(config_error("seed: 2.5\ntable: {type: strip, width: 1}\nmass: {gamma: 0.5}\n").field() == "seed");
}

TEST_CASE("overrides") {
    YAML::Node root = YAML::Load("seed: 1\ntable: {type: sinai, radius: 0.2}\nmass: {gamma: 0.5}\n");
    apply_override(root, "table.radius=0.3");
    apply_override(root, "verify.samples=10");
    CHECK(root["table"]["radius"].as<double>() == 0.3);
    CHECK(root["verify"]["samples"].as<int>() == 10);
    CHECK_THROWS_AS(apply_override(root, "table=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "seed.x=3"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "noequals"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "a..b=1"), ConfigError);
    CHECK_THROWS_AS(apply_override(root, "seed=[1, 2]"), ConfigError);
}

TEST_CASE("error records and exit codes") {
    const fs::path dir = scratch("errors");
    const fs::path cfg = write_config(dir, "seed: 1\ntable:\n  type: strip\n  width: -1\nmass: {gamma: 0.5}\n");
    const Invocation bad = invoke({"simulate", cfg.string()});
    CHECK(bad.code == kExitConfig);
    const auto rec = nlohmann::json::parse(bad.err);
    CHECK(rec["error"]["kind"] == "config");
    CHECK(rec["error"]["field"] == "table");

    const Invocation usage = invoke({"fly", cfg.string()});
    CHECK(usage.code == kExitConfig);
    CHECK(nlohmann::json::parse(usage.err)["error"]["kind"] == "usage");

    const Invocation missing = invoke({"simulate", (dir / "nope.yaml").string()});
    CHECK(missing.code == kExitConfig);

    const fs::path syntax = write_config(dir, "seed: 1\ntable: {type: strip\n");
    const Invocation parse = invoke({"simulate", syntax.string()});
    CHECK(parse.code == kExitConfig);
    CHECK(nlohmann::json::parse(parse.err)["error"].contains("line"));

    // A non-period-2 start is a runtime error, not a config error.
    const fs::path orbit = write_config(dir, std::string(kTriangle) + "stability: {family: orbit}\n");
    const Invocation rt = invoke({"stability", orbit.string()});
    CHECK(rt.code == kExitRuntime);
    CHECK(nlohmann::json::parse(rt.err)["error"]["kind"] == "runtime");
}

TEST_CASE("simulate is deterministic across runs and worker counts") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    const fs::path ca = write_config(a, kTriangle);
    const fs::path cb = write_config(b, kTriangle);
    ::setenv("NOSLIP_WORKERS", "1", 1);
    CHECK(invoke({"simulate", ca.string()}).code == 0);
    ::setenv("NOSLIP_WORKERS", "3", 1);
    const Invocation r = invoke({"simulate", cb.string()});
    ::unsetenv("NOSLIP_WORKERS");
    CHECK(r.code == 0);
    for (const char* f : {"summary.csv", "trajectory.svg", "trajectory_00.csv", "trajectory_39.csv"})
        CHECK(slurp(a / "out" / f) == slurp(b / "out" / f));
    // Triangle orbits are period 4 or 6.
    const auto summary = nlohmann::json::parse(r.out);
    std::size_t periodic = 0;
    for (const auto& [k, v] : summary["periods_of_completed"].items()) {
        CHECK((k == "4" || k == "6"));
        periodic += v.get<std::size_t>();
    }
    CHECK(periodic == 40);

    ::setenv("NOSLIP_WORKERS", "zero", 1);
    CHECK(invoke({"simulate", ca.string()}).code == kExitConfig);
    ::unsetenv("NOSLIP_WORKERS");
}

TEST_CASE("trajectory CSV round trip") {
    const Table t = tables::sinai(0.3);
    const MassParams m = MassParams::uniform_disc();
    Rng rng(5);
    const TrajectoryRecord rec = trajectory(t, m, random_state(t, rng), 30);
    const std::string csv = trajectory_csv(rec);
    const std::vector<TrajectoryRow> rows = parse_trajectory_csv(csv);
    const std::vector<TrajectoryRow> direct = trajectory_rows(rec);
    REQUIRE(rows.size() == direct.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].s == direct[k].s);
        CHECK(rows[k].u1 == direct[k].u1);
        CHECK(rows[k].u2 == direct[k].u2);
        CHECK(rows[k].pos_x == direct[k].pos_x);
        CHECK(rows[k].flight_time == direct[k].flight_time);
    }
    CHECK(rows.back().termination == "Completed");
    CHECK(rows.front().termination.empty());
    // Re-ingesting a row continues the orbit.
    for (std::size_t k : {0, 10, 20}) {
        const State xi = state_from_row(t, rows[k]);
        CHECK((xi.v - rec.states[k].v).norm() < 1e-15);
        const TrajectoryRecord cont = trajectory(t, m, xi, 5);
        for (std::size_t j = 1; j <= 5; ++j) {
            CHECK(cont.states[j].loc.piece_index == rec.states[k + j].loc.piece_index);
            CHECK(std::abs(cont.states[j].loc.s - rec.states[k + j].loc.s) < 1e-10);
            CHECK((cont.states[j].v - rec.states[k + j].v).norm() < 1e-10);
        }
    }
    CHECK_THROWS(parse_trajectory_csv("step,s\n"));
    CHECK_THROWS(parse_trajectory_csv(std::string(kTrajectoryHeader) + "\n0,0,x,0,0,0,0,0,\n"));
}

TEST_CASE("from_csv continues the last row") {
    const fs::path dir = scratch("continue");
    const fs::path cfg = write_config(dir, R"(seed: 2
collisions: 20
table: {type: two_arc_lens, cap_angle: 2.0}
mass: {gamma: 0.7071067811865476}
initial:
  states: [{piece: 0, s: 0.3, u1: 0.1, u2: 0.2}]
simulate: {svg: false}
output: {dir: first}
)");
    REQUIRE(invoke({"simulate", cfg.string()}).code == 0);
    const auto first = read_trajectory_csv(dir / "first" / "trajectory_0.csv");
    REQUIRE(invoke({"simulate", cfg.string(), "--set", "initial.from_csv=first/trajectory_0.csv",
                    "--set", "output.dir=second"})
                .code == 0);
    // Explicit state first, then the CSV continuation.
    const auto second = read_trajectory_csv(dir / "second" / "trajectory_1.csv");
    CHECK(second.front().s == first.back().s);
    CHECK(second.front().u1 == first.back().u1);
    CHECK(second.front().u2 == first.back().u2);
}

TEST_CASE("stability, sweep, wedge and verify subcommands") {
    const fs::path dir = scratch("subcommands");
    const fs::path cfg = write_config(dir, R"(seed: 3
collisions: 200
table: {type: sinai, radius: 0.25}
mass: {gamma: 0.7071067811865476}
stability: {family: sinai, radius: 0.35}
sweep: {family: sinai, from: 0.30, to: 0.36, count: 13}
wedge: {q_max: 5}
verify: {samples: 60}
output: {dir: out}
)");
    const Invocation st = invoke({"stability", cfg.string()});
    REQUIRE(st.code == 0);
    const auto j = nlohmann::json::parse(slurp(dir / "out" / "stability.json"));
    for (const char* k : {"trace", "eigenvalues", "class", "zeta", "zeta0", "critical_radius"}) CHECK(j.contains(k));
    CHECK(j["class"] == "Elliptic");
    CHECK(j["trace"].get<double>() == doctest::Approx(j["simulated_trace"].get<double>()).epsilon(1e-9));

    const Invocation sw = invoke({"sweep", cfg.string()});
    REQUIRE(sw.code == 0);
    const auto s = nlohmann::json::parse(sw.out);
    REQUIRE(s["transitions"].size() == 1);
    CHECK(s["transitions"][0]["bisected"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-9));

    REQUIRE(invoke({"wedge", cfg.string()}).code == 0);
    const std::string cat = slurp(dir / "out" / "wedge_catalog.csv");
    CHECK(cat.rfind("p,q,branch,phi,theta,period\n", 0) == 0);
    CHECK(cat.find("1,3,lower,") != std::string::npos);
    const auto w = nlohmann::json::parse(invoke({"wedge", cfg.string()}).out);
    CHECK(w["period_2q_confirmed"] == w["rational_rows"]);

    const Invocation ok = invoke({"verify", cfg.string()});
    CHECK(ok.code == kExitOk);
    CHECK(nlohmann::json::parse(ok.out)["pass"] == true);
    const Invocation strict = invoke({"verify", cfg.string(), "--set", "verify.reversibility_tol=1e-30"});
    CHECK(strict.code == kExitCheckFailed);

    // Portrait writes the CSV schema and an SVG.
    REQUIRE(invoke({"portrait", cfg.string(), "--set", "initial.random=3"}).code == 0);
    const std::string pc = slurp(dir / "out" / "portrait.csv");
    CHECK(pc.rfind("u1,u2,orbit_id\n", 0) == 0);
    CHECK(slurp(dir / "out" / "portrait.svg").find("<svg") == 0);
}

TEST_CASE("float formatting") {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(std::stod(fmt17(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(fmt6(1.0 / 3.0) == "0.333333");
}
