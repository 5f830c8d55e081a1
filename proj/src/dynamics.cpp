#include "noslip/dynamics.hpp"

#include <cmath>
#include <limits>

namespace noslip {

State make_state(const BoundaryLoc& loc, const Vec3& v) {
    if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("state velocity must be unit");
    if (!(v.dot(loc.frame.e3) > 0.0))
        throw std::invalid_argument("state velocity must point into the table");
    return {loc, v};
}

State state_from_coords(const BoundaryLoc& loc, double u1, double u2) {
    const double r2 = u1 * u1 + u2 * u2;
    if (!(r2 < 1.0)) throw std::invalid_argument("velocity coordinates must lie in the open unit disc");
    const Frame& f = loc.frame;
    return {loc, u1 * f.e1 + u2 * f.e2 + std::sqrt(1.0 - r2) * f.e3};
}

Vec2 velocity_coords(const State& xi) {
    return {xi.v.dot(xi.loc.frame.e1), xi.v.dot(xi.loc.frame.e2)};
}

Step billiard_map(const Table& table, const CollisionModel& model, const State& xi) {
    const RayHit hit = cast_ray(table, xi.loc, plane_part(xi.v));
    return {{hit.loc, collide(hit.loc, model, xi.v)}, hit.flight_time};
}

Step billiard_map(const Table& table, const MassParams& params, const State& xi) {
    return billiard_map(table, CollisionModel::no_slip(params), xi);
}

TrajectoryRecord trajectory(const Table& table, const CollisionModel& model, const State& xi0,
                            std::size_t n) {
    if (n == 0) throw std::invalid_argument("trajectory needs at least one collision");
    TrajectoryRecord rec;
    rec.states.reserve(n + 1);
    rec.flight_times.reserve(n);
    rec.states.push_back(xi0);
    for (std::size_t k = 0; k < n; ++k) {
        try {
            Step step = billiard_map(table, model, rec.states.back());
            rec.states.push_back(step.state);
            rec.flight_times.push_back(step.flight_time);
        } catch (const DynamicsError& e) {
            rec.termination = e.kind();
            break;
        }
    }
    return rec;
}

TrajectoryRecord trajectory(const Table& table, const MassParams& params, const State& xi0,
                            std::size_t n) {
    return trajectory(table, CollisionModel::no_slip(params), xi0, n);
}

State reverse_state(const CollisionModel& model, const State& xi) {
    const Vec3 local = xi.loc.frame.to_local(xi.v);
    return {xi.loc, -xi.loc.frame.to_world(model.matrix() * local)};
}

State reverse_state(const MassParams& params, const State& xi) {
    return reverse_state(CollisionModel::no_slip(params), xi);
}

State period2_state(const MassParams& params, const BoundaryLoc& locA, const BoundaryLoc& locB,
                    const Vec2& lattice_shift) {
    const Vec2 chord = locB.position + lattice_shift - locA.position;
    if (!(chord.norm() > 0.0)) throw std::domain_error("period-2 endpoints coincide");
    const Vec3 d = lift(chord.normalized());
    const double sin_phi = d.dot(locA.frame.e2);
    const double cos_phi = d.dot(locA.frame.e3);
    if (!(cos_phi > 0.0)) throw std::domain_error("chord does not enter the table at A");
    // The return leg needs the same signed angle at B, seen from B's frame.
    if (std::abs(d.dot(locB.frame.e2) - sin_phi) > 1e-9 || !(-d.dot(locB.frame.e3) > 0.0))
        throw std::domain_error("chord is not a period-2 chord");
    const double c = params.cos_half();
    const double s = params.sin_half();
    const double rho = std::sqrt(1.0 - c * c * cos_phi * cos_phi);
    if (rho < 1e-12) throw std::domain_error("period-2 velocity undefined for beta = 0 normal chord");
    const Vec3 v = (c * sin_phi * locA.frame.e1 + s * d) / rho;
    return {locA, v};
}

double state_distance(const State& a, const State& b, double length_scale) {
    if (a.loc.piece_index != b.loc.piece_index) return std::numeric_limits<double>::infinity();
    // Planar gap rather than |ds| so closed pieces need no wrap handling.
    const double gap = (a.loc.position - b.loc.position).norm();
    return gap / length_scale + (a.v - b.v).norm();
}

bool has_period(const TrajectoryRecord& record, std::size_t p, double tol, double length_scale) {
    const auto& st = record.states;
    if (p == 0 || p >= st.size()) return false;
    for (std::size_t k = 0; k + p < st.size(); ++k)
        if (!(state_distance(st[k], st[k + p], length_scale) <= tol)) return false;
    return true;
}

std::optional<std::size_t> detect_period(const TrajectoryRecord& record, double tol,
                                         double length_scale) {
    for (std::size_t p = 1; p <= record.states.size() / 2; ++p)
        if (has_period(record, p, tol, length_scale)) return p;
    return std::nullopt;
}

}  // namespace noslip
