#include "noslip/stability.hpp"

#include <cmath>
#include <numbers>

namespace noslip {

namespace {

using Mat2 = Eigen::Matrix2d;

Vec3 projected(const Vec3& x, const Vec3& v) { return x - x.dot(v) * v; }

Eigen::Vector4d to_coords(const Vec3& x, const Vec3& y, const WavefrontFrame& w) {
    return {x.dot(w.w1), x.dot(w.w2), y.dot(w.w1), y.dot(w.w2)};
}

// c^2 = cos^2(beta/2) written through gamma so the uniform disc gives exactly 2/3.
double cos_half_sq(const MassParams& p) { return 1.0 / (1.0 + p.gamma * p.gamma); }

void check_phi(double phi) {
    if (!(phi > -std::numbers::pi / 2 && phi < std::numbers::pi / 2))
        throw std::invalid_argument("phi must lie in (-pi/2, pi/2)");
}

}  // namespace

Jacobian4 dT_analytic(const Table& table, const MassParams& params, const State& xi) {
    const CollisionModel model = CollisionModel::no_slip(params);
    const Step step = billiard_map(table, model, xi);
    const Vec3& v = xi.v;
    const Vec3& vt = step.state.v;
    const Frame& f = step.state.loc.frame;
    const double kappa = step.state.loc.kappa;
    const double t = step.flight_time;

    Jacobian4 jac;
    jac.flight_time = t;
    jac.from = wavefront_frame(v);
    jac.to = wavefront_frame(vt);

    const Vec3 vbar{v.x(), v.y(), 0.0};
    if (std::abs(vbar.normalized().dot(f.e3)) < 1e-12)
        throw DynamicsError(Termination::Grazing, "projection singular at the image point");

    const Mat3 sigma = f.matrix();
    const Mat3 C = sigma * model.matrix() * sigma.transpose();
    // Frame derivative along e2: de2 = -kappa e3, de3 = kappa e2.
    Mat3 dsigma;
    dsigma.col(0).setZero();
    dsigma.col(1) = -kappa * f.e3;
    dsigma.col(2) = kappa * f.e2;
    const Mat3 dC = dsigma * model.matrix() * sigma.transpose() +
                    sigma * model.matrix() * dsigma.transpose();
    const Vec3 dC_v = dC * v;

    const double v_e3 = v.dot(f.e3);
    const Vec3 basis[2] = {jac.from.w1, jac.from.w2};
    for (int col = 0; col < 4; ++col) {
        const Vec3 X = col < 2 ? basis[col] : Vec3::Zero();
        const Vec3 Y = col < 2 ? Vec3::Zero() : basis[col - 2];
        const Vec3 Z = X + t * Y;
        // Slide along v onto the tangent plane at the image point.
        const Vec3 Xh = Z - (Z.dot(f.e3) / v_e3) * v;
        const Vec3 Xt = projected(Xh, vt);
        const Vec3 Yt = C * Y + Xh.dot(f.e2) * dC_v;
        jac.m.col(col) = to_coords(Xt, Yt, jac.to);
    }
    return jac;
}

Jacobian4 jacobian_fd(const Table& table, const MassParams& params, const State& xi,
                      double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
    const CollisionModel model = CollisionModel::no_slip(params);
    const Step base = billiard_map(table, model, xi);
    const Piece& piece = table.piece(xi.loc.piece_index);
    const Vec3 tangent = lift(piece.tangent(xi.loc.s));
    const Vec3& v = xi.v;

    Jacobian4 jac;
    jac.flight_time = base.flight_time;
    jac.from = wavefront_frame(v);
    jac.to = wavefront_frame(base.state.v);

    struct Probe {
        Vec3 position;  // planar hit point plus accumulated spin coordinate
        Vec3 velocity;
    };
    auto probe = [&](const Vec3& X, const Vec3& Y, double eps) {
        const Vec3 Xh = X - (X.dot(xi.loc.frame.e3) / v.dot(xi.loc.frame.e3)) * v;
        const BoundaryLoc loc =
            frame_at(table, xi.loc.piece_index, xi.loc.s + eps * Xh.dot(tangent));
        const Vec3 v_eps = (v + eps * Y).normalized();
        const Step out = billiard_map(table, model, {loc, v_eps});
        if (out.state.loc.piece_index != base.state.loc.piece_index)
            throw DynamicsError(Termination::CornerHit, "probe landed on a different piece");
        const double spin = eps * Xh.dot(kSpinAxis) + out.flight_time * v_eps.z();
        const Vec3 pos{out.state.loc.position.x(), out.state.loc.position.y(), spin};
        return Probe{pos, out.state.v};
    };

    const Vec3 basis[2] = {jac.from.w1, jac.from.w2};
    for (int col = 0; col < 4; ++col) {
        const Vec3 X = col < 2 ? basis[col] : Vec3::Zero();
        const Vec3 Y = col < 2 ? Vec3::Zero() : basis[col - 2];
        const Probe plus = probe(X, Y, step);
        const Probe minus = probe(X, Y, -step);
        const Vec3 dpos = (plus.position - minus.position) / (2.0 * step);
        const Vec3 dvel = (plus.velocity - minus.velocity) / (2.0 * step);
        jac.m.col(col) = to_coords(projected(dpos, base.state.v), dvel, jac.to);
    }
    return jac;
}

Mat4 period2_product(const Table& table, const MassParams& params, const State& xi) {
    const Step first = billiard_map(table, params, xi);
    return dT_analytic(table, params, first.state).m * dT_analytic(table, params, xi).m;
}

Mat4 period2_block(const MassParams& params, double phi, double t, double kappa_tilde) {
    check_phi(phi);
    if (!(t > 0.0)) throw std::invalid_argument("flight time must be positive");
    const double c2 = cos_half_sq(params);
    const double c = std::sqrt(c2);
    const double s = params.sin_half();
    const double cp = std::cos(phi);
    const double rho = std::sqrt(1.0 - c2 * cp * cp);
    const double a = 1.0 - 2.0 * c2 * cp * cp;
    const double b = 2.0 * c * cp * rho;
    Mat2 C;
    C << a, -b,
         -b, -a;
    const double cos_psi = s * cp / rho;
    Mat2 theta;
    theta << 0.0, rho,
             0.0, -c * cp;
    theta *= 2.0 * c * cos_psi / cp;

    Mat4 B;
    B.topLeftCorner<2, 2>().setIdentity();
    B.topRightCorner<2, 2>() = t * Mat2::Identity();
    B.bottomLeftCorner<2, 2>() = -kappa_tilde * theta;
    B.bottomRightCorner<2, 2>() = C - t * kappa_tilde * theta;
    return B;
}

Jacobian4 dT_period2(const MassParams& params, double phi, double t, double kappa_tilde) {
    Jacobian4 jac;
    jac.m = period2_block(params, phi, t, kappa_tilde) *
            Eigen::Vector4d(1.0, -1.0, 1.0, -1.0).asDiagonal();
    jac.flight_time = t;
    return jac;
}

double period2_flight_time(const MassParams& params, double phi, double d_bar) {
    const double c2 = cos_half_sq(params);
    const double cp = std::cos(phi);
    return d_bar * std::sqrt(1.0 - c2 * cp * cp) / params.sin_half();
}

double trace_T2(const MassParams& params, double phi, double d_bar, double kappa_q,
                double kappa_qt) {
    if (!(d_bar > 0.0)) throw std::invalid_argument("chord length must be positive");
    const double c2 = cos_half_sq(params);
    const double cp = std::cos(phi);
    const double a = 1.0 - 2.0 * c2 * cp * cp;
    return 4.0 * (a * a - (kappa_q + kappa_qt) * c2 * cp * a * d_bar +
                  kappa_q * kappa_qt * c2 * c2 * cp * cp * d_bar * d_bar);
}

std::string_view to_string(StabilityClass c) {
    switch (c) {
        case StabilityClass::Elliptic: return "Elliptic";
        case StabilityClass::Hyperbolic: return "Hyperbolic";
        case StabilityClass::Parabolic: return "Parabolic";
    }
    return "Unknown";
}

StabilityClass classify(double trace, double tol) {
    const double d = std::abs(trace - 2.0);
    if (d < 2.0 - tol) return StabilityClass::Elliptic;
    if (d > 2.0 + tol) return StabilityClass::Hyperbolic;
    return StabilityClass::Parabolic;
}

double critical_zeta(const MassParams& params, double phi, CurvatureSign sign) {
    check_phi(phi);
    const double cp = std::cos(phi);
    if (sign == CurvatureSign::Negative) return -2.0 * cp;
    const double c2 = cos_half_sq(params);
    if (!(c2 * cp > 0.0)) throw std::invalid_argument("critical zeta undefined");
    return (2.0 - 2.0 * c2 * cp * cp) / (c2 * cp);
}

double sinai_critical_radius(const MassParams& params, double phi) {
    return 1.0 / (critical_zeta(params, phi, CurvatureSign::Positive) + 2.0 * std::cos(phi));
}

StabilityReport make_report(double trace, double tol) {
    StabilityReport r;
    r.trace = trace;
    r.cls = classify(trace, tol);
    const double tau = trace - 2.0;
    const double disc = tau * tau - 4.0;
    r.eigenvalues[0] = 1.0;
    r.eigenvalues[1] = 1.0;
    if (disc >= 0.0) {
        // Larger root first; the smaller one as its reciprocal avoids cancellation.
        const double big = 0.5 * (tau + std::copysign(std::sqrt(disc), tau));
        r.eigenvalues[2] = big;
        r.eigenvalues[3] = big != 0.0 ? 1.0 / big : 0.0;
    } else {
        const double im = 0.5 * std::sqrt(-disc);
        r.eigenvalues[2] = {0.5 * tau, im};
        r.eigenvalues[3] = {0.5 * tau, -im};
    }
    return r;
}

}  // namespace noslip
