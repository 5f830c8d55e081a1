#pragma once

#include "noslip/geometry.hpp"

namespace noslip {

using Mat6 = Eigen::Matrix<double, 6, 6>;
using Vec6 = Eigen::Matrix<double, 6, 1>;

/// Mass distribution of the moving disc. gamma = tan(beta/2) in [0, 1].
struct MassParams {
    double gamma = 0.0;
    double beta = 0.0;

    static MassParams from_gamma(double gamma);
    static MassParams from_beta(double beta);
    /// lambda is the squared radius of gyration over two: I = 2 m lambda, gamma = sqrt(2 lambda)/R.
    static MassParams from_lambda(double lambda, double radius);
    static MassParams uniform_disc() { return from_gamma(1.0 / std::sqrt(2.0)); }

    double cos_half() const { return std::cos(0.5 * beta); }
    double sin_half() const { return std::sin(0.5 * beta); }
};

/// The fixed-wall no-slip matrix in the product-frame basis (e1, e2, e3).
Mat3 noslip_matrix(const MassParams& params);

/// Collision law applied at every boundary point, as a matrix in the
/// product-frame basis. Specular and arbitrary matrices exist for comparison
/// runs and harness negative controls.
class CollisionModel {
public:
    static CollisionModel no_slip(const MassParams& params);
    static CollisionModel specular();
    static CollisionModel custom(const Mat3& matrix);

    const Mat3& matrix() const { return matrix_; }
    bool is_no_slip() const { return no_slip_; }
    /// Only meaningful for no-slip models.
    const MassParams& params() const { return params_; }

private:
    Mat3 matrix_ = Mat3::Identity();
    MassParams params_;
    bool no_slip_ = false;
};

/// sigma_q M sigma_q^T for the model's matrix M at loc.
Mat3 collision_at(const BoundaryLoc& loc, const CollisionModel& model);

/// Post-collision velocity. Requires v_in . e3 < 0.
Vec3 collide(const BoundaryLoc& loc, const CollisionModel& model, const Vec3& v_in);
Vec3 collide(const BoundaryLoc& loc, const MassParams& params, const Vec3& v_in);

struct Eigenframe {
    Vec3 u1;  // fixed by the collision
    Vec3 u2;  // negated
    Vec3 u3;  // negated; equals e3
};

Eigenframe eigenframe(const BoundaryLoc& loc, const MassParams& params);

/// w1 along the spin axis projected off v, w2 = v x w1, w3 = v.
struct WavefrontFrame {
    Vec3 w1;
    Vec3 w2;
    Vec3 w3;
};

WavefrontFrame wavefront_frame(const Vec3& v);

/// delta = 2 / [(1/m1)(1 + 1/g1^2) + (1/m2)(1 + 1/g2^2)].
double two_disc_delta(double m1, double gamma1, double m2, double gamma2);

/// Collision of two rough discs. Coordinates are the (e1, e2, e3) components of
/// body 1 then body 2 in the contact frame, with e3 pointing away from body 1.
Mat6 two_disc_matrix(double m1, double gamma1, double m2, double gamma2);

}  // namespace noslip
