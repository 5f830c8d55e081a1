#pragma once

#include "noslip/dynamics.hpp"

#include <utility>

namespace noslip {

/// Wedge with corner angle 2*phi. P1 runs from the corner along (cos phi, -sin phi),
/// P2 along (cos phi, sin phi); the table is the region between them.
struct WedgeParams {
    double phi = 0.0;
    double beta = 0.0;

    WedgeParams(double phi, const MassParams& mass);
    double delta() const { return std::cos(0.5 * beta) * std::cos(phi); }
};

/// Raised when a return-map leg leaves the chart where its closed form holds.
class ChartExit : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Chart position x (the u1, u2 coordinates on P1), velocity azimuth about the
/// period-2 direction y1, and polar angle psi from y1.
struct WedgeState {
    Vec2 x = Vec2::Zero();
    double varphi = 0.0;
    double psi = 0.0;
};

/// Frames, chart data and derived matrices of one wedge. All matrices are
/// computed from the boundary frames, never transcribed.
class WedgeSystem {
public:
    explicit WedgeSystem(const WedgeParams& params);

    const WedgeParams& params() const { return params_; }
    /// Columns are the eigenframe u_{1,i}, u_{2,i}, u_{3,i} of plane i (1 or 2).
    const Mat3& zeta(int i) const { return i == 1 ? zeta1_ : zeta2_; }
    const Mat3& A(int i) const { return i == 1 ? A1_ : A2_; }
    const Mat3& S() const { return S_; }
    const Mat3& S1() const { return S1_; }
    const Mat3& S2() const { return S2_; }
    /// Chart velocity of the period-2 orbit on plane i.
    const Vec3& y(int i) const { return i == 1 ? y1_ : y2_; }
    /// Chart origin on plane i, in world coordinates (x, y, spin).
    const Vec3& q(int i) const { return i == 1 ? q1_ : q2_; }
    /// World velocity of the period-2 orbit leaving P1.
    Vec3 v1() const { return zeta1_ * y1_; }
    const Vec3& eps_hat(int k) const { return eps_hat_[k - 1]; }
    const Vec3& mu0() const { return mu0_; }
    const Vec3& mu1() const { return mu1_; }
    const Vec3& x0() const { return x0_; }
    double alpha() const { return alpha_; }
    double theta() const { return theta_; }

    Vec3 velocity(double varphi, double psi) const;
    /// (varphi, psi) of a chart velocity.
    std::pair<double, double> spherical(const Vec3& y) const;

    /// Closed-form displacement field; X = x + mu0 . (x - x0) V_r(varphi).
    Vec3 V_r(double r, double varphi) const;

    /// One leg T_i in chart coordinates; x is (x1, x2, 0).
    std::pair<Vec3, Vec3> leg(int i, const Vec3& x, const Vec3& y) const;

    /// R = T2 T1 through the closed form.
    WedgeState return_map(const WedgeState& s) const;
    /// R = T2 T1 by composing the two legs.
    std::pair<Vec3, Vec3> return_map_legs(const Vec3& x, const Vec3& y) const;

    double density(double r, double varphi) const;

private:
    WedgeParams params_;
    Mat3 zeta1_, zeta2_, A1_, A2_, S_, S1_, S2_;
    Vec3 y1_, y2_, q1_, q2_, mu0_, mu1_, x0_;
    Vec3 eps_hat_[3];
    double alpha_ = 0.0;
    double theta_ = 0.0;
};

double rotation_angle(const WedgeParams& params);

enum class Branch { Lower, Upper };
std::string_view to_string(Branch b);

/// Half-angle whose rotation angle satisfies theta = +-2 pi p / q (mod 2 pi).
/// The lower branch gives +2 pi p/q for p/q < 1/2, the upper branch -2 pi p/q.
/// Throws std::domain_error when no wedge realizes the ratio on that branch.
double phi_for_period(const MassParams& mass, int p, int q, Branch branch);

WedgeState return_map(const WedgeParams& params, const WedgeState& s);

/// Invariant density of the return map at fixed r = tan(psi).
double invariant_density(const WedgeParams& params, double r, double varphi);

/// Iterates 1..n of the quotient map on (x . mu0, varphi).
std::vector<std::pair<double, double>> quotient_orbit(const WedgeParams& params, double x_bar0,
                                                      double varphi0, double r, std::size_t n);

/// Simulation-side view of a chart point: a state on P1 plus the spin
/// coordinate of the position, which the reduced state does not carry.
struct LiftedState {
    State state;
    double spin = 0.0;
};

/// The table must be tables::wedge with the same phi (piece 0 is P1).
LiftedState chart_to_world(const WedgeSystem& sys, const Table& table, const Vec2& x,
                           const Vec3& y);
/// Inverse of chart_to_world for states on piece 0.
std::pair<Vec2, Vec3> world_to_chart(const WedgeSystem& sys, const LiftedState& ls);

/// Two billiard_map steps (P1 -> P2 -> P1) with the spin coordinate carried along.
LiftedState simulate_return(const Table& table, const MassParams& mass, const LiftedState& ls);

}  // namespace noslip
