#pragma once

#include "noslip/stability.hpp"
#include "noslip/wedge.hpp"

#include <optional>

namespace noslip::cli {

/// Period-2 family of the Sinai torus: the orbit leaves the scatterer at polar
/// angle phi and lands on the copy one period to the right at pi - phi.
State sinai_period2_state(const Table& sinai_table, const MassParams& mass, double radius,
                          double phi);
/// Planar chord of that orbit.
double sinai_chord(double radius, double phi, double period_x = 1.0);
/// Closed-form Tr(dT^2) for the family.
double sinai_trace(const MassParams& mass, double radius, double phi, double period_x = 1.0);
StabilityReport sinai_report(const MassParams& mass, double radius, double phi,
                             double period_x = 1.0);

/// Radius in [lo, hi] where the family turns from hyperbolic to elliptic, by
/// bisection on the classified trace.
double bisect_sinai_threshold(const MassParams& mass, double phi, double lo, double hi,
                              double tol = 1e-12);

struct WedgeRun {
    Termination termination = Termination::Completed;
    std::size_t collisions = 0;
    std::optional<std::size_t> period;
};

/// Simulates a wedge orbit started in the chart of P1 at (x, varphi, psi) and
/// looks for a period in the collision sequence.
WedgeRun wedge_orbit_period(const MassParams& mass, double phi, const Vec2& x, double varphi,
                            double psi, std::size_t collisions, double tol = 1e-6);

/// Mean per-return advance of the azimuth coordinate along a simulated orbit,
/// unwrapped against the closed-form rotation angle.
double measured_azimuth_advance(const WedgeSystem& sys, const Table& wedge_table,
                                const Vec2& x, double varphi, double psi, std::size_t returns);

}  // namespace noslip::cli
