#pragma once

#include "noslip/random.hpp"
#include "noslip/stability.hpp"
#include "noslip/wedge.hpp"

#include <string>

namespace noslip {

struct CheckReport {
    std::string check_name;
    std::size_t samples = 0;
    std::size_t skipped = 0;  // samples where the map was undefined
    double max_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    double median_error = 0.0;
    double p90_error = 0.0;
    std::string details;
};

/// Random post-collision state: piece and arc length uniform in total boundary
/// length, (u1, u2) uniform in the velocity disc.
State random_state(const Table& table, Rng& rng);

struct SampleOptions {
    std::size_t samples = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    /// Candidates drawn per wanted sample before giving up on undefined orbits.
    std::size_t max_attempts_factor = 50;
};

/// |R T R T xi - xi| with R the reversal of `model`.
CheckReport check_reversibility(const Table& table, const CollisionModel& model,
                                const SampleOptions& opt, double tol = 1e-9);

/// Finite-difference determinant of T in (s, u1, u2) coordinates, converted to
/// boundary-area x hemisphere-area coordinates and weighted by the density
/// v . e3: |det| (v~ . e3) / (v . e3) should be 1.
CheckReport check_measure_invariance(const Table& table, const CollisionModel& model,
                                     const SampleOptions& opt, double fd_step = 1e-6,
                                     double tol = 1e-5);

/// Spectrum {1, 1, r, 1/r} or {1, 1, l, conj(l)} with |l| = 1, checked through
/// the characteristic polynomial, plus M e_1 = e_1.
CheckReport check_eigen_structure(const Mat4& product, double tol = 1e-8);

CheckReport check_energy(const TrajectoryRecord& record, double tol = 1e-9);

/// 1 + mu0 . V_r(varphi) against rho(varphi) / rho(varphi + theta) on a uniform
/// azimuth grid.
CheckReport check_coboundary(const WedgeParams& params, double r, std::size_t grid = 1000,
                             double tol = 1e-10);

}  // namespace noslip
