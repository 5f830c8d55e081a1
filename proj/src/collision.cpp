#include "noslip/collision.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace noslip {

MassParams MassParams::from_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
    return {gamma, 2.0 * std::atan(gamma)};
}

MassParams MassParams::from_beta(double beta) {
    if (!(beta >= 0.0 && beta <= std::numbers::pi / 2 + 1e-15))
        throw std::invalid_argument("beta must lie in [0, pi/2]");
    return {std::tan(0.5 * beta), beta};
}

MassParams MassParams::from_lambda(double lambda, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disc radius must be positive");
    if (!(lambda >= 0.0 && lambda <= 0.5 * radius * radius))
        throw std::invalid_argument("lambda must lie in [0, R^2/2]");
    return from_gamma(std::min(1.0, std::sqrt(2.0 * lambda) / radius));
}

Mat3 noslip_matrix(const MassParams& params) {
    // Rational form in gamma keeps the uniform disc entries exact.
    const double g = params.gamma;
    const double d = 1.0 + g * g;
    const double cb = (1.0 - g * g) / d;
    const double sb = 2.0 * g / d;
    Mat3 m;
    m << -cb, -sb, 0.0,
         -sb, cb, 0.0,
         0.0, 0.0, -1.0;
    return m;
}

CollisionModel CollisionModel::no_slip(const MassParams& params) {
    CollisionModel m;
    m.matrix_ = noslip_matrix(params);
    m.params_ = params;
    m.no_slip_ = true;
    return m;
}

CollisionModel CollisionModel::specular() {
    CollisionModel m;
    m.matrix_ = Vec3(1.0, 1.0, -1.0).asDiagonal();
    return m;
}

CollisionModel CollisionModel::custom(const Mat3& matrix) {
    CollisionModel m;
    m.matrix_ = matrix;
    return m;
}

Mat3 collision_at(const BoundaryLoc& loc, const CollisionModel& model) {
    const Mat3 sigma = loc.frame.matrix();
    return sigma * model.matrix() * sigma.transpose();
}

Vec3 collide(const BoundaryLoc& loc, const CollisionModel& model, const Vec3& v_in) {
    if (!(v_in.dot(loc.frame.e3) < 0.0))
        throw std::invalid_argument("collide: velocity is not incoming");
    return loc.frame.to_world(model.matrix() * loc.frame.to_local(v_in));
}

Vec3 collide(const BoundaryLoc& loc, const MassParams& params, const Vec3& v_in) {
    return collide(loc, CollisionModel::no_slip(params), v_in);
}

Eigenframe eigenframe(const BoundaryLoc& loc, const MassParams& params) {
    const double c = params.cos_half();
    const double s = params.sin_half();
    const Frame& f = loc.frame;
    return {s * f.e1 - c * f.e2, c * f.e1 + s * f.e2, f.e3};
}

WavefrontFrame wavefront_frame(const Vec3& v) {
    const Vec3 p = kSpinAxis - kSpinAxis.dot(v) * v;
    const double n = p.norm();
    if (n < 1e-12)
        throw DynamicsError(Termination::DegenerateWavefront, "velocity parallel to the spin axis");
    const Vec3 w1 = p / n;
    return {w1, v.cross(w1), v};
}

double two_disc_delta(double m1, double gamma1, double m2, double gamma2) {
    return 2.0 / ((1.0 + 1.0 / (gamma1 * gamma1)) / m1 + (1.0 + 1.0 / (gamma2 * gamma2)) / m2);
}

Mat6 two_disc_matrix(double m1, double gamma1, double m2, double gamma2) {
    if (!(m1 > 0.0 && m2 > 0.0)) throw std::invalid_argument("masses must be positive");
    if (!(gamma1 > 0.0 && gamma1 <= 1.0 && gamma2 > 0.0 && gamma2 <= 1.0))
        throw std::invalid_argument("gamma values must lie in (0, 1]");
    const double m = m1 + m2;
    const double delta = two_disc_delta(m1, gamma1, m2, gamma2);

    // C = I - 2 Pi, Pi the kinetic-metric projection onto span(n, b).
    Vec6 metric;
    metric << m1, m1, m1, m2, m2, m2;
    Vec6 n = Vec6::Zero();
    n(2) = -std::sqrt(m2 / (m1 * m));
    n(5) = std::sqrt(m1 / (m2 * m));
    Vec6 b;
    b << -1.0 / (gamma1 * m1), 1.0 / m1, 0.0, -1.0 / (gamma2 * m2), -1.0 / m2, 0.0;

    const Vec6 gn = metric.cwiseProduct(n);
    const Vec6 gb = metric.cwiseProduct(b);
    return Mat6::Identity() - 2.0 * n * gn.transpose() - delta * b * gb.transpose();
}

}  // namespace noslip
