#include "noslip/wedge.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace noslip {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

Mat3 eigen_columns(const Frame& f, double c, double s) {
    Mat3 z;
    z.col(0) = s * f.e1 - c * f.e2;
    z.col(1) = c * f.e1 + s * f.e2;
    z.col(2) = f.e3;
    return z;
}

}  // namespace

WedgeParams::WedgeParams(double phi_, const MassParams& mass) : phi(phi_), beta(mass.beta) {
    if (!(phi > 0.0 && phi < kPi / 2)) throw std::invalid_argument("wedge half-angle must lie in (0, pi/2)");
    const double d = delta();
    if (!(d > 0.0 && d < 1.0)) throw std::invalid_argument("wedge delta must lie in (0, 1)");
}

WedgeSystem::WedgeSystem(const WedgeParams& params) : params_(params) {
    const double phi = params.phi;
    const double c = std::cos(0.5 * params.beta);
    const double s = std::sin(0.5 * params.beta);
    const double sp = std::sin(phi);
    const double cp = std::cos(phi);
    const double rho = std::sqrt(1.0 - c * c * cp * cp);

    zeta1_ = eigen_columns(frame_from_normal(Vec2(sp, cp)), c, s);
    zeta2_ = eigen_columns(frame_from_normal(Vec2(sp, -cp)), c, s);
    A1_ = zeta2_.transpose() * zeta1_;
    A2_ = A1_.transpose();
    S_ = Vec3(1.0, -1.0, -1.0).asDiagonal();
    S1_ = A1_.transpose() * S_ * A1_;
    S2_ = S_ * A1_.transpose() * S_ * A1_;

    y1_ = Vec3(0.0, -sp, s * cp) / rho;
    y2_ = Vec3(0.0, sp, s * cp) / rho;
    alpha_ = 2.0 * sp * rho;
    q1_ = Vec3(s * cp, -s * sp, c * sp * sp);
    q2_ = Vec3(s * cp, s * sp, -c * sp * sp);

    eps_hat_[0] = Vec3::UnitX();
    // Azimuth runs clockwise about y1 so that S2 advances it by +theta.
    eps_hat_[1] = -Vec3(0.0, s * cp, sp) / rho;
    eps_hat_[2] = y1_;

    mu0_ = A1_.transpose() * Vec3::UnitZ();
    mu1_ = zeta1_.transpose() * kSpinAxis;
    x0_ = alpha_ * y1_;
    theta_ = rotation_angle(params);
}

Vec3 WedgeSystem::velocity(double varphi, double psi) const {
    return std::cos(psi) * y1_ +
           std::sin(psi) * (std::cos(varphi) * eps_hat_[0] + std::sin(varphi) * eps_hat_[1]);
}

std::pair<double, double> WedgeSystem::spherical(const Vec3& y) const {
    const double a = y.dot(eps_hat_[0]);
    const double b = y.dot(eps_hat_[1]);
    return {std::atan2(b, a), std::atan2(std::hypot(a, b), y.dot(y1_))};
}

Vec3 WedgeSystem::V_r(double r, double varphi) const {
    const Vec3 w = std::cos(varphi) * eps_hat_[0] + std::sin(varphi) * eps_hat_[1];
    const double yz = y1_.z();
    const Vec3 ipw = w + S1_ * w;
    const Vec3 s1w = S1_ * w;
    const Vec3 num =
        r * (ipw - (ipw.z() / yz) * y1_) + r * r * (w.z() * s1w - s1w.z() * w) / yz;
    const double den =
        1.0 - r * (A1_ * w + s1w).z() / yz + r * r * (A1_ * w).z() * s1w.z() / (yz * yz);
    if (std::abs(den) < 1e-12) throw ChartExit("return map leaves its chart");
    return num / (yz * den);
}

std::pair<Vec3, Vec3> WedgeSystem::leg(int i, const Vec3& x, const Vec3& y) const {
    const Mat3& Ai = A(i);
    const Vec3 z = Ai * (x - alpha_ * this->y(i));
    const Vec3 yy = Ai * y;
    if (!(yy.z() < -1e-12)) throw ChartExit("velocity does not reach the opposite plane");
    const double t = -z.z() / yy.z();
    if (!(t > 0.0)) throw ChartExit("opposite plane is behind the velocity");
    return {z + t * yy, S_ * yy};
}

WedgeState WedgeSystem::return_map(const WedgeState& st) const {
    const Vec3 x{st.x.x(), st.x.y(), 0.0};
    const Vec3 X = x + mu0_.dot(x - x0_) * V_r(std::tan(st.psi), st.varphi);
    return {{X.x(), X.y()}, wrap_angle(st.varphi + theta_), st.psi};
}

std::pair<Vec3, Vec3> WedgeSystem::return_map_legs(const Vec3& x, const Vec3& y) const {
    const auto [x2, y2] = leg(1, x, y);
    return leg(2, x2, y2);
}

double WedgeSystem::density(double r, double varphi) const {
    return invariant_density(params_, r, varphi);
}

double rotation_angle(const WedgeParams& params) {
    const double d = params.delta();
    const double d2 = d * d;
    const double theta = std::atan2(4.0 * d * (1.0 - 2.0 * d2) * std::sqrt(1.0 - d2),
                                    1.0 - 8.0 * d2 + 8.0 * d2 * d2);
    return theta <= -kPi ? theta + 2.0 * kPi : theta;
}

std::string_view to_string(Branch b) { return b == Branch::Lower ? "lower" : "upper"; }

double phi_for_period(const MassParams& mass, int p, int q, Branch branch) {
    if (!(p > 0 && q > p)) throw std::invalid_argument("need 0 < p/q < 1");
    if (std::gcd(p, q) != 1) throw std::invalid_argument("p and q must be coprime");
    const double root = std::sqrt(0.5 * (1.0 + std::cos(2.0 * kPi * p / q)));
    const double d2 = 0.5 * (branch == Branch::Lower ? 1.0 - root : 1.0 + root);
    const double cos_phi = std::sqrt(d2) / std::cos(0.5 * mass.beta);
    if (!(cos_phi > 0.0 && cos_phi < 1.0))
        throw std::domain_error("no wedge realizes this rotation on the requested branch");
    return std::acos(cos_phi);
}

WedgeState return_map(const WedgeParams& params, const WedgeState& s) {
    return WedgeSystem(params).return_map(s);
}

double invariant_density(const WedgeParams& params, double r, double varphi) {
    if (!(r >= 0.0)) throw std::invalid_argument("r must be non-negative");
    if (!(r * std::tan(params.phi) / std::sin(0.5 * params.beta) < 1.0))
        throw std::invalid_argument("density is not positive for this r");
    return 1.0 - r * std::tan(params.phi) / std::sin(0.5 * params.beta) * std::sin(varphi);
}

std::vector<std::pair<double, double>> quotient_orbit(const WedgeParams& params, double x_bar0,
                                                      double varphi0, double r, std::size_t n) {
    const WedgeSystem sys(params);
    const double fixed = sys.x0().dot(sys.mu0());
    const double rho0 = invariant_density(params, r, varphi0);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double varphi = varphi0 + static_cast<double>(k) * sys.theta();
        const double ratio = rho0 / invariant_density(params, r, varphi);
        out.emplace_back(ratio * x_bar0 + (1.0 - ratio) * fixed, wrap_angle(varphi));
    }
    return out;
}

LiftedState chart_to_world(const WedgeSystem& sys, const Table& table, const Vec2& x,
                           const Vec3& y) {
    const Vec3 pos = sys.q(1) + sys.zeta(1) * Vec3(x.x(), x.y(), 0.0);
    const Vec2 along{std::cos(sys.params().phi), -std::sin(sys.params().phi)};
    const BoundaryLoc loc = frame_at(table, 0, plane_part(pos).dot(along));
    return {make_state(loc, sys.zeta(1) * y), pos.z()};
}

std::pair<Vec2, Vec3> world_to_chart(const WedgeSystem& sys, const LiftedState& ls) {
    if (ls.state.loc.piece_index != 0) throw std::invalid_argument("state is not on P1");
    const Vec3 pos{ls.state.loc.position.x(), ls.state.loc.position.y(), ls.spin};
    const Vec3 x = sys.zeta(1).transpose() * (pos - sys.q(1));
    return {{x.x(), x.y()}, sys.zeta(1).transpose() * ls.state.v};
}

LiftedState simulate_return(const Table& table, const MassParams& mass, const LiftedState& ls) {
    const CollisionModel model = CollisionModel::no_slip(mass);
    const Step a = billiard_map(table, model, ls.state);
    if (a.state.loc.piece_index != 1) throw ChartExit("first leg did not reach P2");
    const Step b = billiard_map(table, model, a.state);
    if (b.state.loc.piece_index != 0) throw ChartExit("second leg did not reach P1");
    return {b.state, ls.spin + a.flight_time * ls.state.v.z() + b.flight_time * a.state.v.z()};
}

}  // namespace noslip
