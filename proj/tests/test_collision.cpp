#include <doctest.h>

#include "noslip/collision.hpp"
#include "noslip/random.hpp"
#include "noslip/tables.hpp"

#include <cmath>
#include <numbers>

using namespace noslip;

namespace {

constexpr double kPi = std::numbers::pi;

double inf_norm(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// V_i(Q) in the contact frame, from the body velocities.
Vec3 contact_velocity(const Vec3& v, double gamma, double sign) {
    return {0.0, v.y() + sign * v.x() / gamma, v.z()};
}

}  // namespace

TEST_CASE("mass parameter representations agree") {
    const MassParams uni = MassParams::from_lambda(0.25, 1.0);
    CHECK(uni.gamma == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(std::cos(uni.beta) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(std::sin(uni.beta) == doctest::Approx(2.0 * std::sqrt(2.0) / 3.0).epsilon(1e-15));

    const MassParams point = MassParams::from_lambda(0.0, 2.0);
    CHECK(point.gamma == 0.0);
    CHECK(point.beta == 0.0);

    const MassParams rim = MassParams::from_lambda(2.0, 2.0);
    CHECK(rim.gamma == doctest::Approx(1.0));
    CHECK(rim.beta == doctest::Approx(kPi / 2));

    for (double b : {0.1, 0.7, 1.3}) {
        const MassParams p = MassParams::from_beta(b);
        CHECK(MassParams::from_gamma(p.gamma).beta == doctest::Approx(b).epsilon(1e-14));
    }
    CHECK_THROWS_AS(MassParams::from_gamma(1.2), std::invalid_argument);
    CHECK_THROWS_AS(MassParams::from_gamma(-0.1), std::invalid_argument);
    CHECK_THROWS_AS(MassParams::from_beta(2.0), std::invalid_argument);
    CHECK_THROWS_AS(MassParams::from_lambda(0.6, 1.0), std::invalid_argument);
}

TEST_CASE("no-slip matrix entries") {
    const Mat3 m = noslip_matrix(MassParams::uniform_disc());
    Mat3 expected;
    const double r = 2.0 * std::sqrt(2.0) / 3.0;
    expected << -1.0 / 3.0, -r, 0, -r, 1.0 / 3.0, 0, 0, 0, -1;
    CHECK(inf_norm(m - expected) < 1e-15);

    CHECK(inf_norm(noslip_matrix(MassParams::from_gamma(0.0)) -
                   Mat3(Vec3(-1, 1, -1).asDiagonal())) == 0.0);

    Rng rng(5);
    for (int k = 0; k < 1000; ++k) {
        const MassParams p = MassParams::from_beta(rng.uniform(0.0, kPi / 2));
        const Mat3 c = noslip_matrix(p);
        Mat3 trig;
        trig << -std::cos(p.beta), -std::sin(p.beta), 0, -std::sin(p.beta), std::cos(p.beta), 0, 0,
            0, -1;
        CHECK(inf_norm(c - trig) < 1e-15);
        CHECK(inf_norm(c * c - Mat3::Identity()) < 1e-14);
        CHECK(inf_norm(c.transpose() * c - Mat3::Identity()) < 1e-14);
        Eigen::SelfAdjointEigenSolver<Mat3> es(c);
        CHECK(es.eigenvalues()(0) == doctest::Approx(-1.0));
        CHECK(es.eigenvalues()(1) == doctest::Approx(-1.0));
        CHECK(es.eigenvalues()(2) == doctest::Approx(1.0));
    }
}

TEST_CASE("collide at a boundary point") {
    const MassParams p = MassParams::uniform_disc();
    const Table t = tables::sinai(0.25);
    const BoundaryLoc loc = frame_at(t, 0, 0.3);
    const Vec3 out = collide(loc, p, -loc.frame.e3);
    CHECK((out - loc.frame.e3).norm() < 1e-15);

    const Eigenframe u = eigenframe(loc, p);
    const Mat3 C = collision_at(loc, CollisionModel::no_slip(p));
    CHECK((C * u.u1 - u.u1).norm() < 1e-14);
    CHECK((C * u.u2 + u.u2).norm() < 1e-14);
    CHECK((C * u.u3 + u.u3).norm() < 1e-14);

    Rng rng(7);
    for (int k = 0; k < 200; ++k) {
        Vec3 v(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        v.normalize();
        if (v.dot(loc.frame.e3) >= 0) v = v - 2 * v.dot(loc.frame.e3) * loc.frame.e3;
        const Vec3 w = collide(loc, p, v);
        CHECK(std::abs(w.norm() - 1.0) < 1e-14);
        CHECK(w.dot(loc.frame.e3) > 0.0);
        // Spin component follows the first row of the wall matrix.
        const Vec3 l = loc.frame.to_local(v);
        CHECK(w.z() == doctest::Approx(-l.x() / 3.0 - 2.0 * std::sqrt(2.0) / 3.0 * l.y()).epsilon(1e-14));
    }
    CHECK_THROWS_AS(collide(loc, p, loc.frame.e3), std::invalid_argument);
}

TEST_CASE("specular model keeps spin exactly") {
    const Table t = tables::sinai(0.25);
    const BoundaryLoc loc = frame_at(t, 0, 1.0);
    const Vec3 v = Vec3(0.3, -0.2, 0.0) - 0.8 * loc.frame.e3;
    const Vec3 w = collide(loc, CollisionModel::specular(), v);
    CHECK(w.z() == v.z());
}

TEST_CASE("eigenframe") {
    const Table t = tables::strip(1.0);
    const BoundaryLoc loc = frame_at(t, 0, 1.0);
    const Eigenframe u = eigenframe(loc, MassParams::uniform_disc());
    const Vec3 expected = loc.frame.e1 / std::sqrt(3.0) - std::sqrt(2.0 / 3.0) * loc.frame.e2;
    CHECK((u.u1 - expected).norm() < 1e-15);
    const Eigenframe z = eigenframe(loc, MassParams::from_gamma(0.0));
    CHECK((z.u1 + loc.frame.e2).norm() < 1e-15);
    CHECK((z.u2 - loc.frame.e1).norm() < 1e-15);

    Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const MassParams p = MassParams::from_beta(rng.uniform(0, kPi / 2));
        const Eigenframe e = eigenframe(loc, p);
        const Mat3 C = collision_at(loc, CollisionModel::no_slip(p));
        CHECK((C * e.u2 + e.u2).norm() < 1e-14);
        CHECK((C * e.u1 - e.u1).norm() < 1e-14);
    }
}

TEST_CASE("wavefront frame") {
    const WavefrontFrame f = wavefront_frame(Vec3(0.6, 0.8, 0.0));
    CHECK((f.w1 - kSpinAxis).norm() < 1e-15);
    CHECK_THROWS_AS(wavefront_frame(kSpinAxis), DynamicsError);
    Rng rng(9);
    for (int k = 0; k < 500; ++k) {
        const Vec3 v = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)).normalized();
        const WavefrontFrame w = wavefront_frame(v);
        Mat3 m;
        m << w.w1, w.w2, w.w3;
        CHECK(inf_norm(m.transpose() * m - Mat3::Identity()) < 1e-13);
    }
}

TEST_CASE("two-disc matrix") {
    const double delta = two_disc_delta(1, 1 / std::sqrt(2.0), 1, 1 / std::sqrt(2.0));
    CHECK(delta == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Equal mass distributions, unit masses: closed form in gamma.
    for (double g : {0.3, 1 / std::sqrt(2.0), 1.0}) {
        const double d = 1 + g * g;
        Mat6 expected;
        expected << g * g / d, g / d, 0, -1 / d, -g / d, 0,
                    g / d, 1 / d, 0, g / d, g * g / d, 0,
                    0, 0, 0, 0, 0, 1,
                    -1 / d, g / d, 0, g * g / d, -g / d, 0,
                    -g / d, g * g / d, 0, -g / d, 1 / d, 0,
                    0, 0, 1, 0, 0, 0;
        CHECK(inf_norm(two_disc_matrix(1, g, 1, g) - expected) < 1e-15);
    }

    Rng rng(4);
    for (int k = 0; k < 200; ++k) {
        const double m1 = rng.uniform(0.1, 5), m2 = rng.uniform(0.1, 5);
        const double g1 = rng.uniform(0.05, 1), g2 = rng.uniform(0.05, 1);
        const Mat6 C = two_disc_matrix(m1, g1, m2, g2);
        CHECK(inf_norm(C * C - Mat6::Identity()) < 1e-12);
        Vec6 v;
        for (int i = 0; i < 6; ++i) v(i) = rng.uniform(-1, 1);
        const Vec6 w = C * v;
        const Vec3 a = v.head<3>(), b = v.tail<3>(), a2 = w.head<3>(), b2 = w.tail<3>();
        CHECK(std::abs(m1 * a2.squaredNorm() + m2 * b2.squaredNorm() -
                       m1 * a.squaredNorm() - m2 * b.squaredNorm()) < 1e-12);
        CHECK(std::abs(m1 * a2.y() + m2 * b2.y() - m1 * a.y() - m2 * b.y()) < 1e-12);
        CHECK(std::abs(m1 * a2.z() + m2 * b2.z() - m1 * a.z() - m2 * b.z()) < 1e-12);
        // Contact-point velocities: the normal and slip parts of V1(Q) - V2(Q) flip.
        const Vec3 rel_in = contact_velocity(a, g1, -1) - contact_velocity(b, g2, 1);
        const Vec3 rel_out = contact_velocity(a2, g1, -1) - contact_velocity(b2, g2, 1);
        CHECK((rel_out + rel_in).norm() < 1e-12);
    }
    CHECK_THROWS_AS(two_disc_matrix(1, 0.0, 1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(two_disc_matrix(-1, 0.5, 1, 0.5), std::invalid_argument);
}
