#pragma once

#include "noslip/collision.hpp"

#include <optional>

namespace noslip {

/// Post-collision phase point: unit velocity pointing into the table.
struct State {
    BoundaryLoc loc;
    Vec3 v = Vec3::Zero();
};

/// Validates |v| = 1 and v . e3 > 0.
State make_state(const BoundaryLoc& loc, const Vec3& v);

/// State from velocity-disc coordinates (u1, u2) = (v.e1, v.e2).
State state_from_coords(const BoundaryLoc& loc, double u1, double u2);
Vec2 velocity_coords(const State& xi);

inline WavefrontFrame wavefront_frame(const State& xi) { return wavefront_frame(xi.v); }

struct Step {
    State state;
    double flight_time = 0.0;
};

/// One free flight followed by a collision. Throws DynamicsError.
Step billiard_map(const Table& table, const CollisionModel& model, const State& xi);
Step billiard_map(const Table& table, const MassParams& params, const State& xi);

struct TrajectoryRecord {
    std::vector<State> states;  // includes the initial state
    std::vector<double> flight_times;
    Termination termination = Termination::Completed;
};

/// Up to n collisions. Geometry failures end the record instead of throwing.
TrajectoryRecord trajectory(const Table& table, const CollisionModel& model, const State& xi0,
                            std::size_t n);
TrajectoryRecord trajectory(const Table& table, const MassParams& params, const State& xi0,
                            std::size_t n);

/// Time-reversal involution (q, v) -> (q, -C_q v).
State reverse_state(const CollisionModel& model, const State& xi);
State reverse_state(const MassParams& params, const State& xi);

/// Period-2 state leaving locA toward locB. On a torus, lattice_shift is added
/// to locB's position to pick the copy the chord lands on. Throws
/// std::domain_error if no period-2 orbit joins the two points.
State period2_state(const MassParams& params, const BoundaryLoc& locA, const BoundaryLoc& locB,
                    const Vec2& lattice_shift = Vec2::Zero());

/// Distance used for recurrence: position gap over scale plus velocity gap. Infinite when the pieces differ.
double state_distance(const State& a, const State& b, double length_scale);

/// True when states k and k + p agree for every k in the record.
bool has_period(const TrajectoryRecord& record, std::size_t p, double tol = 1e-6,
                double length_scale = 1.0);

/// Smallest p <= states/2 with has_period, if any.
std::optional<std::size_t> detect_period(const TrajectoryRecord& record, double tol = 1e-6,
                                         double length_scale = 1.0);

}  // namespace noslip
