#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace noslip {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// World 3-vectors are laid out as (plane x, plane y, spin). The spin axis is
// the same at every boundary point.
inline const Vec3 kSpinAxis{0.0, 0.0, 1.0};

inline Vec3 lift(const Vec2& p) { return {p.x(), p.y(), 0.0}; }
inline Vec2 plane_part(const Vec3& v) { return {v.x(), v.y()}; }

/// Why an orbit stopped. Completed is the only non-error value.
enum class Termination { Completed, Escape, CornerHit, Grazing, DegenerateWavefront };

std::string_view to_string(Termination t);

/// Raised when the billiard map is undefined at a state.
class DynamicsError : public std::runtime_error {
public:
    DynamicsError(Termination kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    Termination kind() const { return kind_; }

private:
    Termination kind_;
};

struct Segment {
    Vec2 a;
    Vec2 b;
};

/// Which side of a circular arc the table occupies.
enum class ArcSide { Outside, Inside };

struct Arc {
    Vec2 center;
    double radius = 1.0;
    double angle_start = 0.0;
    double angle_end = 0.0;
    ArcSide side = ArcSide::Outside;
};

/// A smooth boundary piece parameterized by arc length s in [0, length()].
///
/// Segments keep the table on their left (counterclockwise outer boundaries).
/// Arcs are parameterized counterclockwise from angle_start; the table side is
/// explicit. A full circle (extent 2*pi) has no endpoints and its s wraps.
class Piece {
public:
    Piece(const Segment& seg);
    Piece(const Arc& arc);

    const std::variant<Segment, Arc>& shape() const { return shape_; }
    bool is_segment() const { return std::holds_alternative<Segment>(shape_); }

    double length() const { return length_; }
    bool closed() const { return closed_; }

    Vec2 point(double s) const;
    /// Unit vector d(point)/ds.
    Vec2 tangent(double s) const;
    Vec2 inward_normal(double s) const;
    /// Signed geodesic curvature <e2, D_e2 e3>: positive when dispersing.
    double curvature() const;

    /// Maps s into [0, length) for closed pieces; otherwise returns s unchanged.
    double wrap(double s) const;

private:
    std::variant<Segment, Arc> shape_;
    double length_ = 0.0;
    bool closed_ = false;
};

struct Planar {};
struct Torus {
    double period_x = 1.0;
    double period_y = 1.0;
};
using Topology = std::variant<Planar, Torus>;

struct Tolerances {
    double t_min = 1e-9;            // discard intersections this close to departure
    double corner = 1e-9;           // arc-length distance to an endpoint that counts as a corner
    double graze = 1e-9;            // |cos| of incidence below which a hit is grazing
    double tie = 1e-12;             // equal-time candidates on different pieces
    double max_flight_time = 1e4;
};

class Table {
public:
    explicit Table(std::vector<Piece> pieces, Topology topology = Planar{}, Tolerances tol = {});

    const std::vector<Piece>& pieces() const { return pieces_; }
    const Piece& piece(std::size_t i) const;
    const Topology& topology() const { return topology_; }
    const Tolerances& tolerances() const { return tol_; }
    bool is_torus() const { return std::holds_alternative<Torus>(topology_); }
    double total_length() const;

    Table with_tolerances(const Tolerances& tol) const;

private:
    std::vector<Piece> pieces_;
    Topology topology_;
    Tolerances tol_;
};

/// Product frame at a boundary point. Columns of matrix() are (e1, e2, e3):
/// spin axis, tangent, inward normal, with e1 x e2 = e3.
struct Frame {
    Vec3 e1;
    Vec3 e2;
    Vec3 e3;

    Mat3 matrix() const;
    /// Components of a world vector in this frame.
    Vec3 to_local(const Vec3& v) const { return {v.dot(e1), v.dot(e2), v.dot(e3)}; }
    Vec3 to_world(const Vec3& c) const { return c.x() * e1 + c.y() * e2 + c.z() * e3; }
};

Frame frame_from_normal(const Vec2& inward_normal);

struct BoundaryLoc {
    std::size_t piece_index = 0;
    double s = 0.0;
    Vec2 position = Vec2::Zero();
    Frame frame;
    double kappa = 0.0;
};

BoundaryLoc frame_at(const Table& table, std::size_t piece_index, double s);

struct RayHit {
    BoundaryLoc loc;
    double flight_time = 0.0;
};

/// First boundary point hit by start.position + t * plane_velocity, t > t_min.
/// On a torus the hit is reported in the fundamental domain and flight_time is
/// the unwrapped time. Throws DynamicsError (Escape, CornerHit, Grazing).
RayHit cast_ray(const Table& table, const BoundaryLoc& start, const Vec2& plane_velocity);

}  // namespace noslip
