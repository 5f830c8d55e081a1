#include "noslip/cli/experiments.hpp"

#include "noslip/tables.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace noslip::cli {

State sinai_period2_state(const Table& sinai_table, const MassParams& mass, double radius,
                          double phi) {
    constexpr double kPi = std::numbers::pi;
    const BoundaryLoc a = frame_at(sinai_table, 0, radius * std::fmod(phi + 2 * kPi, 2 * kPi));
    const BoundaryLoc b = frame_at(sinai_table, 0, radius * (kPi - phi));
    const auto* torus = std::get_if<Torus>(&sinai_table.topology());
    const double shift = torus ? torus->period_x : 1.0;
    return period2_state(mass, a, b, Vec2(shift, 0.0));
}

double sinai_chord(double radius, double phi, double period_x) {
    return period_x - 2.0 * radius * std::cos(phi);
}

double sinai_trace(const MassParams& mass, double radius, double phi, double period_x) {
    const double d = sinai_chord(radius, phi, period_x);
    if (!(d > 0.0)) throw std::domain_error("scatterer too large for the period-2 family");
    return trace_T2(mass, phi, d, 1.0 / radius, 1.0 / radius);
}

StabilityReport sinai_report(const MassParams& mass, double radius, double phi, double period_x) {
    StabilityReport r = make_report(sinai_trace(mass, radius, phi, period_x));
    Thresholds t;
    t.zeta = sinai_chord(radius, phi, period_x) / radius;
    t.zeta0 = critical_zeta(mass, phi, CurvatureSign::Positive);
    t.critical_radius = period_x * sinai_critical_radius(mass, phi);
    r.thresholds = t;
    return r;
}

double bisect_sinai_threshold(const MassParams& mass, double phi, double lo, double hi, double tol) {
    auto cls = [&](double R) { return classify(sinai_trace(mass, R, phi)); };
    if (cls(lo) != StabilityClass::Hyperbolic || cls(hi) != StabilityClass::Elliptic)
        throw std::domain_error("bracket does not straddle the hyperbolic/elliptic switch");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (cls(mid) == StabilityClass::Elliptic) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

WedgeRun wedge_orbit_period(const MassParams& mass, double phi, const Vec2& x, double varphi,
                            double psi, std::size_t collisions, double tol) {
    const WedgeSystem sys(WedgeParams(phi, mass));
    const Table table = tables::wedge(phi);
    const LiftedState start = chart_to_world(sys, table, x, sys.velocity(varphi, psi));
    const TrajectoryRecord rec = trajectory(table, mass, start.state, collisions);
    WedgeRun run;
    run.termination = rec.termination;
    run.collisions = rec.flight_times.size();
    if (rec.termination == Termination::Completed) run.period = detect_period(rec, tol);
    return run;
}

double measured_azimuth_advance(const WedgeSystem& sys, const Table& wedge_table, const Vec2& x,
                                double varphi, double psi, std::size_t returns) {
    constexpr double kTwoPi = 2.0 * std::numbers::pi;
    LiftedState ls = chart_to_world(sys, wedge_table, x, sys.velocity(varphi, psi));
    double prev = sys.spherical(world_to_chart(sys, ls).second).first;
    double total = 0.0;
    for (std::size_t k = 0; k < returns; ++k) {
        ls = simulate_return(wedge_table, MassParams::from_beta(sys.params().beta), ls);
        const double az = sys.spherical(world_to_chart(sys, ls).second).first;
        // Azimuth is only defined mod 2 pi; take the branch nearest theta.
        total += sys.theta() + std::remainder(az - prev - sys.theta(), kTwoPi);
        prev = az;
    }
    return total / static_cast<double>(returns);
}

}  // namespace noslip::cli
