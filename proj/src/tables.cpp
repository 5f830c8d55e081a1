#include "noslip/tables.hpp"

#include <cmath>
#include <numbers>

namespace noslip::tables {

namespace {
constexpr double kPi = std::numbers::pi;
}

Table strip(double width, double half_length) {
    if (!(width > 0.0 && half_length > 0.0)) throw std::invalid_argument("strip sizes must be positive");
    return Table({Piece(Segment{{-half_length, 0.0}, {half_length, 0.0}}),
                  Piece(Segment{{half_length, width}, {-half_length, width}})});
}

Table wedge(double phi, double arm_length) {
    if (!(phi > 0.0 && phi < kPi / 2)) throw std::invalid_argument("wedge half-angle must lie in (0, pi/2)");
    if (!(arm_length > 0.0)) throw std::invalid_argument("arm length must be positive");
    const Vec2 lower = arm_length * Vec2(std::cos(phi), -std::sin(phi));
    const Vec2 upper = arm_length * Vec2(std::cos(phi), std::sin(phi));
    return Table({Piece(Segment{Vec2::Zero(), lower}), Piece(Segment{upper, Vec2::Zero()})});
}

Table polygon(const std::vector<Vec2>& vertices) {
    const std::size_t n = vertices.size();
    if (n < 3) throw std::invalid_argument("polygon needs at least three vertices");
    double area2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec2& a = vertices[k];
        const Vec2& b = vertices[(k + 1) % n];
        area2 += a.x() * b.y() - a.y() * b.x();
    }
    if (!(area2 > 0.0)) throw std::invalid_argument("polygon vertices must be counterclockwise");
    std::vector<Piece> pieces;
    pieces.reserve(n);
    for (std::size_t k = 0; k < n; ++k) pieces.emplace_back(Segment{vertices[k], vertices[(k + 1) % n]});
    return Table(std::move(pieces));
}

Table regular_polygon(int n, double circumradius) {
    if (n < 3) throw std::invalid_argument("regular polygon needs n >= 3");
    if (!(circumradius > 0.0)) throw std::invalid_argument("circumradius must be positive");
    std::vector<Vec2> v;
    const double start = -kPi / 2 - kPi / n;
    for (int k = 0; k < n; ++k) {
        const double a = start + 2.0 * kPi * k / n;
        v.emplace_back(circumradius * std::cos(a), circumradius * std::sin(a));
    }
    return polygon(v);
}

Table sinai(double radius, double period_x, double period_y) {
    if (!(radius > 0.0 && 2.0 * radius < std::min(period_x, period_y)))
        throw std::invalid_argument("scatterer must fit inside the fundamental domain");
    Arc arc{{0.5 * period_x, 0.5 * period_y}, radius, 0.0, 2.0 * kPi, ArcSide::Outside};
    return Table({Piece(arc)}, Torus{period_x, period_y});
}

double lens_radius(double cap_angle, double chord) {
    if (!(cap_angle > 0.0 && cap_angle <= kPi)) throw std::invalid_argument("cap angle must lie in (0, pi]");
    if (!(chord > 0.0)) throw std::invalid_argument("chord must be positive");
    return 0.5 * chord / std::sin(0.5 * cap_angle);
}

Table two_arc_lens(double cap_angle, double chord) {
    const double r = lens_radius(cap_angle, chord);
    const double h = 0.5 * cap_angle;
    const double off = r * std::cos(h);
    Arc right{{-off, 0.0}, r, -h, h, ArcSide::Inside};
    Arc left{{off, 0.0}, r, kPi - h, kPi + h, ArcSide::Inside};
    return Table({Piece(right), Piece(left)});
}

}  // namespace noslip::tables
