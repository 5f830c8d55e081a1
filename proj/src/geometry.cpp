#include "noslip/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

namespace noslip {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Angle of `a` measured counterclockwise from `start`, in [0, 2pi).
double angle_from(double start, double a) {
    double rel = std::fmod(a - start, kTwoPi);
    if (rel < 0.0) rel += kTwoPi;
    return rel;
}

struct Candidate {
    std::size_t piece = 0;
    double t = 0.0;
    double s = 0.0;
    bool corner = false;
    double cos_incidence = 0.0;  // unit direction . inward normal; negative when incoming
};

// Arc-length position of a point known to lie on the arc's circle, or nullopt
// if it is outside the arc (with `margin` of arc length slack at both ends).
std::optional<double> arc_param(const Arc& arc, const Vec2& p, double margin) {
    const Vec2 r = p - arc.center;
    const double extent = arc.angle_end - arc.angle_start;
    const double rel = angle_from(arc.angle_start, std::atan2(r.y(), r.x()));
    if (extent >= kTwoPi) return rel * arc.radius;
    const double slack = margin / arc.radius;
    if (rel <= extent + slack) return std::min(rel, extent) * arc.radius;
    if (rel >= kTwoPi - slack) return 0.0;
    return std::nullopt;
}

void intersect_segment(const Segment& seg, std::size_t index, const Vec2& origin, const Vec2& dir,
                       const Tolerances& tol, std::vector<Candidate>& out) {
    const Vec2 e = seg.b - seg.a;
    const double len = e.norm();
    const Vec2 u = e / len;
    const double denom = cross(dir, u);
    if (std::abs(denom) < 1e-300) return;
    const Vec2 ap = seg.a - origin;
    const double t = cross(ap, u) / denom;
    if (t <= tol.t_min) return;
    const double along = cross(ap, dir) / denom;
    if (along < -tol.corner || along > len + tol.corner) return;
    Candidate c;
    c.piece = index;
    c.t = t;
    c.s = std::clamp(along, 0.0, len);
    c.corner = along < tol.corner || along > len - tol.corner;
    const Vec2 n{-u.y(), u.x()};
    c.cos_incidence = dir.normalized().dot(n);
    out.push_back(c);
}

void intersect_arc(const Arc& arc, std::size_t index, const Vec2& origin, const Vec2& dir,
                   const Tolerances& tol, std::vector<Candidate>& out) {
    const Vec2 rel = origin - arc.center;
    const double a = dir.squaredNorm();
    const double b = 2.0 * dir.dot(rel);
    const double c = rel.squaredNorm() - arc.radius * arc.radius;
    const double disc = b * b - 4.0 * a * c;
    if (disc < 0.0) return;
    const double sq = std::sqrt(disc);
    // Numerically stable pair of roots.
    const double qv = -0.5 * (b + std::copysign(sq, b));
    double roots[2];
    int nroots = 0;
    if (qv != 0.0) {
        roots[nroots++] = qv / a;
        roots[nroots++] = c / qv;
    } else {
        roots[nroots++] = 0.0;
    }
    const bool closed = arc.angle_end - arc.angle_start >= kTwoPi;
    const double extent_len = (arc.angle_end - arc.angle_start) * arc.radius;
    const Vec2 unit_dir = dir.normalized();
    for (int k = 0; k < nroots; ++k) {
        const double t = roots[k];
        if (t <= tol.t_min) continue;
        const Vec2 p = origin + t * dir;
        const auto s = arc_param(arc, p, tol.corner);
        if (!s) continue;
        Vec2 radial = (p - arc.center) / arc.radius;
        const Vec2 n = arc.side == ArcSide::Outside ? radial : Vec2(-radial);
        const double cos_inc = unit_dir.dot(n);
        if (cos_inc >= tol.graze) continue;  // hit from behind the piece
        Candidate cand;
        cand.piece = index;
        cand.t = t;
        cand.s = *s;
        cand.corner = !closed && (*s < tol.corner || *s > extent_len - tol.corner);
        cand.cos_incidence = cos_inc;
        out.push_back(cand);
    }
}

void intersect_piece(const Piece& piece, std::size_t index, const Vec2& origin, const Vec2& dir,
                     const Tolerances& tol, std::vector<Candidate>& out) {
    std::size_t before = out.size();
    if (const auto* seg = std::get_if<Segment>(&piece.shape())) {
        intersect_segment(*seg, index, origin, dir, tol, out);
        // Back-side hits on segments are only possible for open tables; drop them.
        if (out.size() > before && out.back().cos_incidence >= tol.graze) out.pop_back();
    } else {
        intersect_arc(std::get<Arc>(piece.shape()), index, origin, dir, tol, out);
    }
}

// Picks the nearest candidate and applies the corner/tie/grazing rules.
RayHit resolve(const Table& table, std::vector<Candidate>& cands, const Vec2& shift) {
    const Tolerances& tol = table.tolerances();
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& l, const Candidate& r) { return l.t < r.t; });
    const Candidate& best = cands.front();
    if (best.corner) throw DynamicsError(Termination::CornerHit, "ray hit a corner");
    if (cands.size() > 1 && cands[1].t - best.t < tol.tie && cands[1].piece != best.piece)
        throw DynamicsError(Termination::CornerHit, "ray hit two pieces at once");
    if (best.cos_incidence > -tol.graze)
        throw DynamicsError(Termination::Grazing, "grazing collision");
    (void)shift;
    return RayHit{frame_at(table, best.piece, best.s), best.t};
}

bool in_interior(const Piece& piece, const Vec2& p, double margin) {
    if (const auto* seg = std::get_if<Segment>(&piece.shape())) {
        const Vec2 e = seg->b - seg->a;
        const double len = e.norm();
        const double along = (p - seg->a).dot(e) / len;
        const double off = std::abs(cross(e / len, p - seg->a));
        return off < 1e-9 && along > margin && along < len - margin;
    }
    const Arc& arc = std::get<Arc>(piece.shape());
    if (std::abs((p - arc.center).norm() - arc.radius) > 1e-9) return false;
    const auto s = arc_param(arc, p, 0.0);
    if (!s) return false;
    if (piece.closed()) return true;
    return *s > margin && *s < piece.length() - margin;
}

// Intersection points of the supporting line/circle of two pieces.
std::vector<Vec2> curve_intersections(const Piece& p, const Piece& q) {
    std::vector<Vec2> pts;
    const auto* sp = std::get_if<Segment>(&p.shape());
    const auto* sq = std::get_if<Segment>(&q.shape());
    auto line_circle = [&pts](const Segment& s, const Arc& c) {
        const Vec2 d = (s.b - s.a).normalized();
        const Vec2 rel = s.a - c.center;
        const double b = d.dot(rel);
        const double disc = b * b - (rel.squaredNorm() - c.radius * c.radius);
        if (disc < 0.0) return;
        const double r = std::sqrt(disc);
        pts.push_back(s.a + (-b - r) * d);
        if (r > 0.0) pts.push_back(s.a + (-b + r) * d);
    };
    if (sp && sq) {
        const Vec2 d1 = sp->b - sp->a;
        const Vec2 d2 = sq->b - sq->a;
        const double denom = cross(d1, d2);
        if (std::abs(denom) < 1e-14 * d1.norm() * d2.norm()) {
            // Collinear overlap: report the other segment's endpoints.
            if (std::abs(cross(d1.normalized(), sq->a - sp->a)) < 1e-12) {
                pts.push_back(sq->a);
                pts.push_back(sq->b);
                pts.push_back(sp->a);
                pts.push_back(sp->b);
                pts.push_back(0.5 * (sq->a + sq->b));
            }
            return pts;
        }
        const double t = cross(sq->a - sp->a, d2) / denom;
        pts.push_back(sp->a + t * d1);
    } else if (sp) {
        line_circle(*sp, std::get<Arc>(q.shape()));
    } else if (sq) {
        line_circle(*sq, std::get<Arc>(p.shape()));
    } else {
        const Arc& a = std::get<Arc>(p.shape());
        const Arc& b = std::get<Arc>(q.shape());
        const Vec2 d = b.center - a.center;
        const double dist = d.norm();
        if (dist < 1e-14) return pts;
        const double x = (dist * dist + a.radius * a.radius - b.radius * b.radius) / (2.0 * dist);
        const double h2 = a.radius * a.radius - x * x;
        if (h2 < 0.0) return pts;
        const Vec2 u = d / dist;
        const Vec2 perp{-u.y(), u.x()};
        const double h = std::sqrt(h2);
        pts.push_back(a.center + x * u + h * perp);
        pts.push_back(a.center + x * u - h * perp);
    }
    return pts;
}

}  // namespace

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::Completed: return "Completed";
        case Termination::Escape: return "Escape";
        case Termination::CornerHit: return "CornerHit";
        case Termination::Grazing: return "Grazing";
        case Termination::DegenerateWavefront: return "DegenerateWavefront";
    }
    return "Unknown";
}

Piece::Piece(const Segment& seg) : shape_(seg) {
    length_ = (seg.b - seg.a).norm();
    if (!(length_ > 0.0)) throw std::invalid_argument("segment endpoints must be distinct");
}

Piece::Piece(const Arc& arc) : shape_(arc) {
    if (!(arc.radius > 0.0)) throw std::invalid_argument("arc radius must be positive");
    const double extent = arc.angle_end - arc.angle_start;
    if (!(extent > 0.0) || extent > kTwoPi * (1.0 + 1e-15))
        throw std::invalid_argument("arc angular extent must lie in (0, 2pi]");
    closed_ = extent >= kTwoPi * (1.0 - 1e-15);
    if (closed_) std::get<Arc>(shape_).angle_end = arc.angle_start + kTwoPi;
    length_ = (closed_ ? kTwoPi : extent) * arc.radius;
}

double Piece::wrap(double s) const {
    if (!closed_) return s;
    double w = std::fmod(s, length_);
    if (w < 0.0) w += length_;
    return w;
}

Vec2 Piece::point(double s) const {
    if (const auto* seg = std::get_if<Segment>(&shape_))
        return seg->a + (s / length_) * (seg->b - seg->a);
    const Arc& arc = std::get<Arc>(shape_);
    const double a = arc.angle_start + s / arc.radius;
    return arc.center + arc.radius * Vec2(std::cos(a), std::sin(a));
}

Vec2 Piece::tangent(double s) const {
    if (const auto* seg = std::get_if<Segment>(&shape_)) return (seg->b - seg->a) / length_;
    const Arc& arc = std::get<Arc>(shape_);
    const double a = arc.angle_start + s / arc.radius;
    return {-std::sin(a), std::cos(a)};
}

Vec2 Piece::inward_normal(double s) const {
    if (is_segment()) {
        const Vec2 t = tangent(s);
        return {-t.y(), t.x()};
    }
    const Arc& arc = std::get<Arc>(shape_);
    const double a = arc.angle_start + s / arc.radius;
    const Vec2 radial{std::cos(a), std::sin(a)};
    return arc.side == ArcSide::Outside ? radial : Vec2(-radial);
}

double Piece::curvature() const {
    if (is_segment()) return 0.0;
    const Arc& arc = std::get<Arc>(shape_);
    return arc.side == ArcSide::Outside ? 1.0 / arc.radius : -1.0 / arc.radius;
}

Table::Table(std::vector<Piece> pieces, Topology topology, Tolerances tol)
    : pieces_(std::move(pieces)), topology_(topology), tol_(tol) {
    if (pieces_.empty()) throw std::invalid_argument("table needs at least one piece");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        for (std::size_t j = i + 1; j < pieces_.size(); ++j) {
            const double margin =
                1e-9 * std::max({1.0, pieces_[i].length(), pieces_[j].length()});
            for (const Vec2& p : curve_intersections(pieces_[i], pieces_[j])) {
                if (in_interior(pieces_[i], p, margin) && in_interior(pieces_[j], p, margin))
                    throw std::invalid_argument("table pieces " + std::to_string(i) + " and " +
                                                std::to_string(j) + " cross");
            }
        }
    }
    if (const auto* torus = std::get_if<Torus>(&topology_)) {
        if (!(torus->period_x > 0.0) || !(torus->period_y > 0.0))
            throw std::invalid_argument("torus periods must be positive");
        for (const Piece& p : pieces_) {
            // Sample densely enough to catch arcs bulging out of the domain.
            const int n = 256;
            for (int k = 0; k <= n; ++k) {
                const Vec2 q = p.point(p.length() * k / n);
                if (q.x() < -1e-12 || q.x() > torus->period_x + 1e-12 || q.y() < -1e-12 ||
                    q.y() > torus->period_y + 1e-12)
                    throw std::invalid_argument("torus pieces must lie in the fundamental domain");
            }
        }
    }
}

const Piece& Table::piece(std::size_t i) const {
    if (i >= pieces_.size()) throw std::out_of_range("piece index out of range");
    return pieces_[i];
}

double Table::total_length() const {
    double total = 0.0;
    for (const Piece& p : pieces_) total += p.length();
    return total;
}

Table Table::with_tolerances(const Tolerances& tol) const {
    Table copy = *this;
    copy.tol_ = tol;
    return copy;
}

Mat3 Frame::matrix() const {
    Mat3 m;
    m.col(0) = e1;
    m.col(1) = e2;
    m.col(2) = e3;
    return m;
}

Frame frame_from_normal(const Vec2& inward_normal) {
    const Vec2 n = inward_normal.normalized();
    return Frame{kSpinAxis, Vec3(n.y(), -n.x(), 0.0), Vec3(n.x(), n.y(), 0.0)};
}

BoundaryLoc frame_at(const Table& table, std::size_t piece_index, double s) {
    const Piece& piece = table.piece(piece_index);
    s = piece.wrap(s);
    const double slack = 1e-12 * std::max(1.0, piece.length());
    if (!(s >= -slack && s <= piece.length() + slack))
        throw std::out_of_range("arc-length parameter outside the piece");
    BoundaryLoc loc;
    loc.piece_index = piece_index;
    loc.s = s;
    loc.position = piece.point(s);
    loc.frame = frame_from_normal(piece.inward_normal(s));
    loc.kappa = piece.curvature();
    return loc;
}

RayHit cast_ray(const Table& table, const BoundaryLoc& start, const Vec2& plane_velocity) {
    const Tolerances& tol = table.tolerances();
    const double speed = plane_velocity.norm();
    if (!(speed > 0.0)) throw std::invalid_argument("plane velocity must be nonzero");
    if (plane_velocity.dot(plane_part(start.frame.e3)) <= 0.0)
        throw std::invalid_argument("plane velocity must point into the table");

    std::vector<Candidate> cands;
    const auto& pieces = table.pieces();

    if (!table.is_torus()) {
        for (std::size_t i = 0; i < pieces.size(); ++i)
            intersect_piece(pieces[i], i, start.position, plane_velocity, tol, cands);
        std::erase_if(cands, [&](const Candidate& c) { return c.t > tol.max_flight_time; });
        if (cands.empty()) throw DynamicsError(Termination::Escape, "ray escapes the table");
        return resolve(table, cands, Vec2::Zero());
    }

    // Torus: walk the lattice cells crossed by the ray.
    const Torus& torus = std::get<Torus>(table.topology());
    const Vec2 period{torus.period_x, torus.period_y};
    const Vec2& p0 = start.position;
    long cell[2] = {static_cast<long>(std::floor(p0.x() / period.x())),
                    static_cast<long>(std::floor(p0.y() / period.y()))};
    double t_next[2];
    double t_delta[2];
    int step[2];
    for (int k = 0; k < 2; ++k) {
        const double d = plane_velocity[k];
        if (d > 0.0) {
            step[k] = 1;
            t_next[k] = ((cell[k] + 1) * period[k] - p0[k]) / d;
            t_delta[k] = period[k] / d;
        } else if (d < 0.0) {
            step[k] = -1;
            t_next[k] = (cell[k] * period[k] - p0[k]) / d;
            t_delta[k] = -period[k] / d;
        } else {
            step[k] = 0;
            t_next[k] = std::numeric_limits<double>::infinity();
            t_delta[k] = std::numeric_limits<double>::infinity();
        }
    }
    while (true) {
        const Vec2 shift{cell[0] * period.x(), cell[1] * period.y()};
        // Intersect in cell-local coordinates to keep the arithmetic well scaled.
        const Vec2 local_origin = p0 - shift;
        for (std::size_t i = 0; i < pieces.size(); ++i)
            intersect_piece(pieces[i], i, local_origin, plane_velocity, tol, cands);
        const double t_exit = std::min(t_next[0], t_next[1]);
        std::erase_if(cands, [&](const Candidate& c) { return c.t > tol.max_flight_time; });
        if (!cands.empty()) {
            const double best =
                std::min_element(cands.begin(), cands.end(), [](const auto& l, const auto& r) {
                    return l.t < r.t;
                })->t;
            if (best <= t_exit + tol.tie) return resolve(table, cands, shift);
        }
        if (t_exit > tol.max_flight_time)
            throw DynamicsError(Termination::Escape, "no collision within max flight time");
        const int axis = t_next[0] < t_next[1] ? 0 : 1;
        cell[axis] += step[axis];
        t_next[axis] += t_delta[axis];
    }
}

}  // namespace noslip
