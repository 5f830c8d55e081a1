#include "noslip/verification.hpp"

#include "noslip/parallel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace noslip {

namespace {

void summarize(CheckReport& r, std::vector<double> errors) {
    r.samples = errors.size();
    if (errors.empty()) {
        r.pass = false;
        r.details = "no usable samples";
        return;
    }
    std::sort(errors.begin(), errors.end());
    r.max_error = errors.back();
    r.median_error = errors[errors.size() / 2];
    r.p90_error = errors[std::min(errors.size() - 1, errors.size() * 9 / 10)];
    r.pass = r.max_error < r.tolerance;
}

// Draws candidates in fixed-size batches and evaluates them in parallel. Slots
// are filled by index, so the kept samples do not depend on the worker count.
template <class Eval>
std::vector<double> sample_errors(const Table& table, const SampleOptions& opt,
                                  std::size_t& skipped, Eval eval) {
    Rng rng(opt.seed);
    std::vector<double> errors;
    skipped = 0;
    const std::size_t max_attempts = opt.samples * opt.max_attempts_factor;
    std::size_t attempts = 0;
    while (errors.size() < opt.samples && attempts < max_attempts) {
        const std::size_t batch = std::min(opt.samples - errors.size(), max_attempts - attempts);
        std::vector<State> states;
        states.reserve(batch);
        for (std::size_t i = 0; i < batch; ++i) states.push_back(random_state(table, rng));
        std::vector<std::optional<double>> out(batch);
        parallel_for(batch, opt.workers, [&](std::size_t i) {
            try {
                out[i] = eval(states[i]);
            } catch (const DynamicsError&) {
            } catch (const std::out_of_range&) {
            }
        });
        for (const auto& e : out) {
            if (e) errors.push_back(*e);
            else ++skipped;
        }
        attempts += batch;
    }
    return errors;
}

double arc_gap(const Piece& piece, double a, double b) {
    const double d = a - b;
    return piece.closed() ? std::remainder(d, piece.length()) : d;
}

}  // namespace

State random_state(const Table& table, Rng& rng) {
    double s = rng.uniform() * table.total_length();
    std::size_t idx = 0;
    const auto& pieces = table.pieces();
    while (idx + 1 < pieces.size() && s >= pieces[idx].length()) s -= pieces[idx++].length();
    s = std::min(s, pieces[idx].length());
    double u1 = 0.0;
    double u2 = 0.0;
    do {
        u1 = rng.uniform(-1.0, 1.0);
        u2 = rng.uniform(-1.0, 1.0);
    } while (u1 * u1 + u2 * u2 >= 1.0);
    return state_from_coords(frame_at(table, idx, s), u1, u2);
}

CheckReport check_reversibility(const Table& table, const CollisionModel& model,
                                const SampleOptions& opt, double tol) {
    CheckReport r;
    r.check_name = "reversibility";
    r.tolerance = tol;
    auto errors = sample_errors(table, opt, r.skipped, [&](const State& xi) {
        const State a = billiard_map(table, model, xi).state;
        const State b = billiard_map(table, model, reverse_state(model, a)).state;
        const State back = reverse_state(model, b);
        if (back.loc.piece_index != xi.loc.piece_index) return 1.0;
        return (back.loc.position - xi.loc.position).norm() + (back.v - xi.v).norm();
    });
    summarize(r, std::move(errors));
    return r;
}

CheckReport check_measure_invariance(const Table& table, const CollisionModel& model,
                                     const SampleOptions& opt, double fd_step, double tol) {
    CheckReport r;
    r.check_name = "measure_invariance";
    r.tolerance = tol;
    std::atomic<std::size_t> unresolved{0};
    auto errors = sample_errors(table, opt, r.skipped, [&](const State& xi) {
        const Step base = billiard_map(table, model, xi);
        const Piece& out_piece = table.piece(base.state.loc.piece_index);
        const Vec2 u = velocity_coords(xi);
        auto image = [&](const Eigen::Vector3d& dx) {
            const State p = state_from_coords(frame_at(table, xi.loc.piece_index, xi.loc.s + dx(0)),
                                              u.x() + dx(1), u.y() + dx(2));
            const Step st = billiard_map(table, model, p);
            if (st.state.loc.piece_index != base.state.loc.piece_index)
                throw DynamicsError(Termination::CornerHit, "probe changed piece");
            const Vec2 ut = velocity_coords(st.state);
            return Eigen::Vector3d(arc_gap(out_piece, st.state.loc.s, base.state.loc.s), ut.x(),
                                   ut.y());
        };
        auto central = [&](double h) {
            Mat3 J;
            for (int k = 0; k < 3; ++k) {
                Eigen::Vector3d d = Eigen::Vector3d::Zero();
                d(k) = h;
                J.col(k) = (image(d) - image(-d)) / (2.0 * h);
            }
            return J;
        };
        // A single step cannot serve every orbit: long flights amplify
        // roundoff at small steps and curvature at large ones. Walk a ladder
        // of steps around fd_step, Richardson-extrapolate adjacent rungs, and
        // keep the estimate that agrees best with its neighbour.
        // Rungs grow until a probe leaves the velocity disc or the piece.
        constexpr int kRungs = 7;
        std::vector<Mat3> c;
        for (int k = 0; k < kRungs; ++k) {
            try {
                c.push_back(central(fd_step * std::pow(4.0, k - 2)));
            } catch (const std::invalid_argument&) {
                if (k < 2) throw DynamicsError(Termination::Grazing, "velocity disc edge");
                break;
            } catch (const DynamicsError&) {
                if (k < 2) throw;
                break;
            }
        }
        std::vector<double> dets;
        for (std::size_t k = 0; k + 1 < c.size(); ++k) dets.push_back(((16.0 * c[k] - c[k + 1]) / 15.0).determinant());
        double det = dets[0];
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k + 1 < dets.size(); ++k) {
            const double gap = std::abs(dets[k] - dets[k + 1]);
            if (gap < best) {
                best = gap;
                det = dets[k];
            }
        }
        // Stencils straddling a singular curve (a tangency that switches the
        // landing copy) never settle; such points are not differentiable.
        if (!(best < 0.1 * tol)) {
            ++unresolved;
            throw DynamicsError(Termination::Grazing, "finite differences did not settle");
        }
        // In (s, u1, u2) the invariant measure is ds du1 du2.
        return std::abs(std::abs(det) - 1.0);
    });
    summarize(r, std::move(errors));
    if (r.samples > 0) r.details = "unresolved=" + std::to_string(unresolved.load());
    return r;
}

CheckReport check_eigen_structure(const Mat4& M, double tol) {
    CheckReport r;
    r.check_name = "eigen_structure";
    r.tolerance = tol;
    // M e_1 = e_1 makes M block triangular; the rest of the spectrum lives in
    // the lower 3x3 block N, whose characteristic polynomial must be
    // (x - 1)(x^2 - tau x + 1): tr N equals the sum of principal 2x2 minors
    // and det N = 1. These coefficients avoid the ill-conditioned double root.
    const Eigen::Vector4d ex = Eigen::Vector4d::UnitX();
    const Mat3 N = M.bottomRightCorner<3, 3>();
    const double f1 = N.trace();
    const double f2 = N(0, 0) * N(1, 1) - N(0, 1) * N(1, 0) + N(0, 0) * N(2, 2) -
                      N(0, 2) * N(2, 0) + N(1, 1) * N(2, 2) - N(1, 2) * N(2, 1);
    const double f3 = N.determinant();
    const double scale = 1.0 + std::abs(f1);
    const double errs[] = {
        (M.col(0) - ex).norm(),
        std::abs(f2 - f1) / scale,
        std::abs(f3 - 1.0),
    };
    r.samples = 1;
    r.max_error = *std::max_element(std::begin(errs), std::end(errs));
    r.median_error = r.max_error;
    r.p90_error = r.max_error;
    r.pass = r.max_error < tol;
    const double tau = f1 - 1.0;
    std::ostringstream os;
    os << "trace=" << M.trace() << " "
       << (std::abs(tau) > 2.0 ? "real pair r, 1/r" : "unit-circle pair");
    r.details = os.str();
    return r;
}

CheckReport check_energy(const TrajectoryRecord& record, double tol) {
    CheckReport r;
    r.check_name = "energy";
    r.tolerance = tol;
    std::vector<double> errors;
    errors.reserve(record.states.size());
    for (const State& s : record.states) errors.push_back(std::abs(s.v.norm() - 1.0));
    summarize(r, std::move(errors));
    return r;
}

CheckReport check_coboundary(const WedgeParams& params, double r, std::size_t grid, double tol) {
    CheckReport rep;
    rep.check_name = "coboundary";
    rep.tolerance = tol;
    const WedgeSystem sys(params);
    std::vector<double> errors;
    errors.reserve(grid);
    for (std::size_t k = 0; k < grid; ++k) {
        const double vp = -std::numbers::pi + 2.0 * std::numbers::pi * static_cast<double>(k) / grid;
        try {
            const double lhs = 1.0 + sys.mu0().dot(sys.V_r(r, vp));
            const double rhs = invariant_density(params, r, vp) / invariant_density(params, r, vp + sys.theta());
            errors.push_back(std::abs(lhs - rhs));
        } catch (const ChartExit&) {
            ++rep.skipped;
        }
    }
    summarize(rep, std::move(errors));
    if (rep.samples > 0) {
        std::ostringstream os;
        os << "r=" << r << " theta=" << sys.theta();
        rep.details = os.str();
    }
    return rep;
}

}  // namespace noslip
