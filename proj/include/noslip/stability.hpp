#pragma once

#include "noslip/dynamics.hpp"

#include <array>
#include <complex>
#include <optional>

namespace noslip {

using Mat4 = Eigen::Matrix4d;

/// dT at a state, acting on (X, Y) in v-perp + v-perp. Rows and columns are
/// (X.w1, X.w2, Y.w1, Y.w2) with the wavefront frame of the source state on the
/// input side and of the image state on the output side.
struct Jacobian4 {
    Mat4 m = Mat4::Identity();
    double flight_time = 0.0;
    WavefrontFrame from;
    WavefrontFrame to;
};

Jacobian4 dT_analytic(const Table& table, const MassParams& params, const State& xi);

/// Central differences of billiard_map, lifted so the spin coordinate of the
/// position is tracked. Same bases as dT_analytic.
Jacobian4 jacobian_fd(const Table& table, const MassParams& params, const State& xi,
                      double step = 1e-7);

/// dT over the two legs of a period-2 orbit, J(T xi) * J(xi).
Mat4 period2_product(const Table& table, const MassParams& params, const State& xi);

/// Block matrix [[I, tI], [-k Theta, C - t k Theta]] with C and Theta written
/// in the wavefront basis (w1, w2) shared by both ends of one leg.
Mat4 period2_block(const MassParams& params, double phi, double t, double kappa_tilde);

/// One period-2 leg in the Jacobian4 bases. The image velocity is -v, so its
/// w2 is the negative of the source w2; legs compose by plain products.
Jacobian4 dT_period2(const MassParams& params, double phi, double t, double kappa_tilde);

/// Flight time of a period-2 leg whose chord has planar length d_bar.
double period2_flight_time(const MassParams& params, double phi, double d_bar);

/// Tr(dT^2) for a period-2 orbit with planar chord d_bar and end curvatures.
double trace_T2(const MassParams& params, double phi, double d_bar, double kappa_q,
                double kappa_qt);

enum class StabilityClass { Elliptic, Hyperbolic, Parabolic };
std::string_view to_string(StabilityClass c);

StabilityClass classify(double trace, double tol = 1e-9);

enum class CurvatureSign { Positive, Negative };

/// Ends of the elliptic window -2 cos(phi) < zeta < zeta0 for zeta = kappa d_bar.
/// Positive gives zeta0, Negative gives -2 cos(phi).
double critical_zeta(const MassParams& params, double phi, CurvatureSign sign);

/// Scatterer radius on the unit torus where the horizontal-family orbit at phi
/// turns elliptic; larger radii are elliptic.
double sinai_critical_radius(const MassParams& params, double phi);

struct Thresholds {
    double zeta = 0.0;
    double zeta0 = 0.0;
    double critical_radius = 0.0;
};

struct StabilityReport {
    double trace = 0.0;
    std::array<std::complex<double>, 4> eigenvalues;
    StabilityClass cls = StabilityClass::Parabolic;
    std::optional<Thresholds> thresholds;
};

/// Eigenvalues follow from the trace alone: 1, 1 and the roots of
/// x^2 - (trace - 2) x + 1.
StabilityReport make_report(double trace, double tol = 1e-9);

}  // namespace noslip
