#include <doctest.h>

#include "noslip/dynamics.hpp"
#include "noslip/random.hpp"
#include "noslip/tables.hpp"
#include "noslip/verification.hpp"

#include <cmath>
#include <numbers>

using namespace noslip;

namespace {

constexpr double kPi = std::numbers::pi;
const MassParams kUniform = MassParams::uniform_disc();

double gap(const State& a, const State& b) {
    if (a.loc.piece_index != b.loc.piece_index) return 1e300;
    return (a.loc.position - b.loc.position).norm() + (a.v - b.v).norm();
}

}  // namespace

TEST_CASE("strip normal bounce is period 2") {
    const Table t = tables::strip(1.0, 10.0);
    const State xi = make_state(frame_at(t, 0, 10.0), Vec3(0, 1, 0));
    const Step a = billiard_map(t, kUniform, xi);
    CHECK(a.flight_time == doctest::Approx(1.0).epsilon(1e-15));
    const Step b = billiard_map(t, kUniform, a.state);
    CHECK(gap(b.state, xi) < 1e-15);
    const TrajectoryRecord rec = trajectory(t, kUniform, xi, 6);
    CHECK(rec.states.size() == 7);
    CHECK(rec.flight_times.size() == 6);
    CHECK(detect_period(rec) == std::optional<std::size_t>(2));
}

TEST_CASE("trajectory rejects n = 0 and records terminations") {
    const Table t = tables::wedge(0.5, 10.0);
    const State xi = state_from_coords(frame_at(t, 0, 2.0), 0.0, 0.9);
    CHECK_THROWS_AS(trajectory(t, kUniform, xi, 0), std::invalid_argument);
    const TrajectoryRecord rec = trajectory(t, kUniform, xi, 100);
    CHECK(rec.termination == Termination::Escape);
    CHECK(rec.flight_times.size() + 1 == rec.states.size());
}

TEST_CASE("velocity coordinates round trip") {
    const Table t = tables::sinai(0.25);
    Rng rng(8);
    for (int k = 0; k < 200; ++k) {
        const State xi = random_state(t, rng);
        const Vec2 u = velocity_coords(xi);
        const State back = state_from_coords(xi.loc, u.x(), u.y());
        CHECK((back.v - xi.v).norm() < 1e-15);
    }
    const State n = make_state(frame_at(t, 0, 0.0), frame_at(t, 0, 0.0).frame.e3);
    CHECK(velocity_coords(n).norm() == 0.0);
}

TEST_CASE("reversal") {
    const Table t = tables::sinai(0.25);
    const State n = make_state(frame_at(t, 0, 0.2), frame_at(t, 0, 0.2).frame.e3);
    CHECK((reverse_state(kUniform, n).v - n.v).norm() < 1e-15);
    Rng rng(12);
    for (int k = 0; k < 300; ++k) {
        const State xi = random_state(t, rng);
        const State r = reverse_state(kUniform, xi);
        CHECK(r.v.dot(r.loc.frame.e3) > 0.0);
        CHECK((reverse_state(kUniform, r).v - xi.v).norm() < 1e-14);
        const State a = billiard_map(t, kUniform, xi).state;
        const State b = reverse_state(kUniform, billiard_map(t, kUniform, reverse_state(kUniform, a)).state);
        CHECK(gap(b, xi) < 1e-9);
    }
}

TEST_CASE("period-2 states") {
    // Normal chord on parallel walls: v = e3.
    const Table strip = tables::strip(1.0, 10.0);
    const State s0 = period2_state(kUniform, frame_at(strip, 0, 10.0), frame_at(strip, 1, 10.0));
    CHECK((s0.v - Vec3(0, 1, 0)).norm() < 1e-15);
    // Slanted chord between parallel walls is not period 2.
    CHECK_THROWS_AS(period2_state(kUniform, frame_at(strip, 0, 10.0), frame_at(strip, 1, 9.0)),
                    std::domain_error);

    // Wedge: the chord perpendicular to the bisector.
    const double phi = 0.5;
    const Table w = tables::wedge(phi, 10.0);
    const double r = 2.0;
    const State sw = period2_state(kUniform, frame_at(w, 0, r), frame_at(w, 1, 10.0 - r));
    const double c = kUniform.cos_half(), s = kUniform.sin_half();
    const double rho = std::sqrt(1 - c * c * std::cos(phi) * std::cos(phi));
    CHECK((sw.v - Vec3(0, s, -c * std::sin(phi)) / rho).norm() < 1e-15);
    const TrajectoryRecord rec = trajectory(w, kUniform, sw, 8);
    CHECK(gap(rec.states[2], sw) < 1e-10);
    CHECK(has_period(rec, 2, 1e-10));
    // Velocity coordinates of the period-2 state.
    const Vec2 u = velocity_coords(sw);
    CHECK(std::abs(u.x()) == doctest::Approx(c * std::sin(phi) / rho));
    CHECK(std::abs(u.y()) == doctest::Approx(s * std::sin(phi) / rho));

    // Sinai family: A at angle phi, B at angle pi - phi in the next cell.
    const double R = 0.25;
    const Table sinai = tables::sinai(R);
    for (double ph : {-0.6, -0.2, 0.0, 0.3, 0.7, 1.0}) {
        const BoundaryLoc A = frame_at(sinai, 0, R * std::fmod(ph + 2 * kPi, 2 * kPi));
        const BoundaryLoc B = frame_at(sinai, 0, R * (kPi - ph));
        const State x = period2_state(kUniform, A, B, Vec2(1, 0));
        const State y = billiard_map(sinai, kUniform, billiard_map(sinai, kUniform, x).state).state;
        CHECK(gap(x, y) < 1e-10);
    }
}

TEST_CASE("energy drift over a long Sinai run") {
    const Table t = tables::sinai(0.25);
    Rng rng(21);
    const State xi = random_state(t, rng);
    const TrajectoryRecord rec = trajectory(t, kUniform, xi, 100000);
    CHECK(rec.termination == Termination::Completed);
    CHECK(check_energy(rec, 1e-9).pass);
    CHECK_FALSE(detect_period(rec).has_value());
}

TEST_CASE("specular comparison keeps spin") {
    const Table t = tables::regular_polygon(5);
    Rng rng(3);
    const State xi = random_state(t, rng);
    const TrajectoryRecord rec = trajectory(t, CollisionModel::specular(), xi, 1000);
    for (const State& s : rec.states) CHECK(s.v.z() == xi.v.z());
}

TEST_CASE("equilateral triangle orbits have period 4 or 6") {
    const Table t = tables::regular_polygon(3);
    Rng rng(17);
    int checked = 0;
    for (int k = 0; k < 100; ++k) {
        const TrajectoryRecord rec = trajectory(t, kUniform, random_state(t, rng), 24);
        if (rec.termination != Termination::Completed) continue;
        ++checked;
        const auto p = detect_period(rec);
        REQUIRE(p.has_value());
        CHECK((*p == 4 || *p == 6));
    }
    CHECK(checked > 90);
}

TEST_CASE("strip orbit stays bounded") {
    const Table t = tables::strip(1.0, 1e4);
    const State xi = state_from_coords(frame_at(t, 0, 1e4), 0.3, 0.4);
    const TrajectoryRecord rec = trajectory(t, kUniform, xi, 100000);
    CHECK(rec.termination == Termination::Completed);
    double lo = 1e300, hi = -1e300;
    for (const State& s : rec.states) {
        lo = std::min(lo, s.loc.position.x());
        hi = std::max(hi, s.loc.position.x());
    }
    CHECK(hi - lo < 10.0);
}
