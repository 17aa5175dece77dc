// flow.hpp — time integration of the Hamiltonian flow and its variational
// (tangent) flow. Default stepper is implicit midpoint: symplectic for
// general H, second order, with bounded energy drift. Leapfrog is allowed
// only when the system is declared separable; classical RK4 is kept as a
// non-symplectic cross-check.
//
// The tangent matrix is advanced jointly with the base point. With the
// midpoint state m = (x_k + x_{k+1})/2 the update
//   M_{k+1} = (I − h/2 · J·Hess(m))⁻¹ (I + h/2 · J·Hess(m)) M_k
// is a Cayley transform of a Hamiltonian matrix, hence exactly symplectic
// per step up to roundoff.

#pragma once

#include "hamshade/hamsys.hpp"
#include "hamshade/types.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace hamshade {

enum class Method { ImplicitMidpoint, Leapfrog, RK4Reference };

struct FlowPolicy {
    double step = 1e-3;
    Method method = Method::ImplicitMidpoint;
    double solver_tol = 1e-12;  // implicit-solve fixed-point/Newton tolerance
    int solver_max_iters = 50;
    bool allow_singular_start = false;
    double singular_tol = 1e-8;
    double record_dt = 0.0;  // sampling interval for trajectories; 0 = every step
};

struct TrajectorySample {
    std::vector<double> times;
    std::vector<Vec> points;
    double energy_drift = 0.0;  // max |H(x(t)) − H(x(0))| over all computed steps
};

struct TangentFlowResult {
    Mat M;  // 2n x 2n tangent map DX^t at x0
    double t = 0.0;
    double symplectic_defect = 0.0;  // max-abs norm of MᵀJM − J
};

namespace detail {

/// One implicit-midpoint step; fixed-point iteration with Newton fallback.
inline Vec midpoint_step(const HamiltonianSystem& sys, const Vec& x, double h, const FlowPolicy& pol) {
    Vec y = x + h * sys.field(x);  // explicit predictor
    const double scale = std::max(1.0, x.norm());
    for (int it = 0; it < pol.solver_max_iters; ++it) {
        const Vec ynext = x + h * sys.field(0.5 * (x + y));
        const double delta = (ynext - y).norm();
        y = ynext;
        if (delta <= pol.solver_tol * scale) return y;
    }
    // Newton fallback on G(y) = y − x − h·X_H((x+y)/2).
    const int d = sys.dim();
    for (int it = 0; it < pol.solver_max_iters; ++it) {
        const Vec m = 0.5 * (x + y);
        const Vec G = y - x - h * sys.field(m);
        if (G.norm() <= pol.solver_tol * scale) return y;
        Mat Jg = Mat::Identity(d, d);
        const Mat A = sys.hess(m);
        for (int c = 0; c < d; ++c) {
            Vec col = apply_J(Vec(A.col(c)));
            Jg.col(c) -= 0.5 * h * col;
        }
        const Vec dy = Jg.partialPivLu().solve(G);
        y -= dy;
        if (dy.norm() <= pol.solver_tol * scale) return y;
    }
    throw StepRejected("implicit midpoint solve failed to converge");
}

/// Leapfrog (kick-drift-kick) for separable H = T(p) + V(q) with T = ½‖p‖².
inline Vec leapfrog_step(const HamiltonianSystem& sys, const Vec& x, double h) {
    const int n = sys.dof();
    Vec q = x.head(n), p = x.tail(n);
    Vec state(2 * n);
    state << q, p;
    Vec g = sys.grad(state);
    p -= 0.5 * h * g.head(n);
    q += h * p;
    state << q, p;
    g = sys.grad(state);
    p -= 0.5 * h * g.head(n);
    Vec out(2 * n);
    out << q, p;
    return out;
}

inline Vec rk4_step(const HamiltonianSystem& sys, const Vec& x, double h) {
    const Vec k1 = sys.field(x);
    const Vec k2 = sys.field(x + 0.5 * h * k1);
    const Vec k3 = sys.field(x + 0.5 * h * k2);
    const Vec k4 = sys.field(x + h * k3);
    return x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
}

inline Vec flow_step(const HamiltonianSystem& sys, const Vec& x, double h, const FlowPolicy& pol) {
    switch (pol.method) {
        case Method::ImplicitMidpoint:
            return midpoint_step(sys, x, h, pol);
        case Method::Leapfrog:
            if (!sys.separable())
                throw Error("leapfrog requires a system declared separable: " + sys.name());
            return leapfrog_step(sys, x, h);
        case Method::RK4Reference:
            return rk4_step(sys, x, h);
    }
    throw Error("unknown integration method");
}

/// Tangent update matching the base step. For midpoint this is the Cayley
/// transform at the solved midpoint; for RK4 the same RK4 stages applied to
/// the linearized field.
inline void tangent_step(const HamiltonianSystem& sys, const Vec& x_old, const Vec& x_new, double h,
                         const FlowPolicy& pol, Mat& M) {
    const int d = sys.dim();
    auto JH = [&](const Vec& at) {
        const Mat A = sys.hess(at);
        Mat out(d, d);
        const int n = d / 2;
        out.topRows(n) = A.bottomRows(n);
        out.bottomRows(n) = -A.topRows(n);
        return out;  // J·Hess(at)
    };
    switch (pol.method) {
        case Method::ImplicitMidpoint: {
            const Mat A = JH(0.5 * (x_old + x_new));
            const Mat lhs = Mat::Identity(d, d) - 0.5 * h * A;
            const Mat rhs = (Mat::Identity(d, d) + 0.5 * h * A) * M;
            M = lhs.partialPivLu().solve(rhs);
            break;
        }
        case Method::Leapfrog: {
            // Exact Jacobian of the discrete kick-drift-kick map, so M is the
            // derivative of the trajectory actually computed.
            const int n = d / 2;
            const Mat Vqq_old = sys.hess(x_old).topLeftCorner(n, n);
            const Mat Vqq_new = sys.hess(x_new).topLeftCorner(n, n);
            auto kick = [&](const Mat& Vqq) {
                Mat K = Mat::Identity(d, d);
                K.bottomLeftCorner(n, n) = -0.5 * h * Vqq;
                return K;
            };
            Mat D = Mat::Identity(d, d);
            D.topRightCorner(n, n) = h * Mat::Identity(n, n);
            M = kick(Vqq_new) * D * kick(Vqq_old) * M;
            break;
        }
        case Method::RK4Reference: {
            const Vec xm = 0.5 * (x_old + x_new);
            const Mat A1 = JH(x_old), A2 = JH(xm), A4 = JH(x_new);
            const Mat k1 = A1 * M;
            const Mat k2 = A2 * (M + 0.5 * h * k1);
            const Mat k3 = A2 * (M + 0.5 * h * k2);
            const Mat k4 = A4 * (M + h * k3);
            M += (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
            break;
        }
    }
}

struct StepPlan {
    int count;
    double h;          // signed full step
    double last;       // signed remainder step (0 if none)
};

inline StepPlan plan_steps(double t_final, double step) {
    if (step <= 0) throw Error("flow policy: step must be positive");
    const double T = std::abs(t_final);
    const double sign = t_final < 0 ? -1.0 : 1.0;
    int count = static_cast<int>(std::floor(T / step + 1e-12));
    double last = T - count * step;
    if (last < 1e-12 * std::max(1.0, T)) last = 0.0;
    return {count, sign * step, sign * last};
}

}  // namespace detail

/// Integrate from x0 to t_final, recording samples every record_dt (or every
/// step). Energy drift is tracked across every computed step.
inline TrajectorySample integrate(const HamiltonianSystem& sys, const Vec& x0, double t_final,
                                  const FlowPolicy& pol = {}) {
    if (!pol.allow_singular_start && !sys.is_regular(x0, pol.singular_tol))
        throw SingularStart("integrate: start point is singular (‖∇H‖ below tolerance)");
    const double e0 = sys.eval_h(x0);
    TrajectorySample out;
    out.times.push_back(0.0);
    out.points.push_back(x0);

    const auto plan = detail::plan_steps(t_final, pol.step);
    Vec x = x0;
    double t = 0.0;
    double next_record = pol.record_dt > 0 ? pol.record_dt : 0.0;
    auto record = [&](double tt, const Vec& xx) {
        if (pol.record_dt <= 0 || std::abs(tt) + 1e-15 >= next_record) {
            out.times.push_back(tt);
            out.points.push_back(xx);
            if (pol.record_dt > 0) next_record += pol.record_dt;
        }
    };
    auto advance = [&](double h) {
        x = detail::flow_step(sys, x, h, pol);
        t += h;
        if (!all_finite(x)) throw StepRejected("integration produced non-finite state");
        out.energy_drift = std::max(out.energy_drift, std::abs(sys.eval_h(x) - e0));
        record(t, x);
    };
    for (int k = 0; k < plan.count; ++k) advance(plan.h);
    if (plan.last != 0.0) advance(plan.last);
    if (out.times.back() != t) {  // ensure final state is recorded
        out.times.push_back(t);
        out.points.push_back(x);
    }
    return out;
}

/// Terminal point of the flow; streams without recording the trajectory.
inline Vec flow_at(const HamiltonianSystem& sys, const Vec& x0, double t_final, const FlowPolicy& pol = {}) {
    if (!pol.allow_singular_start && !sys.is_regular(x0, pol.singular_tol))
        throw SingularStart("flow_at: start point is singular");
    const auto plan = detail::plan_steps(t_final, pol.step);
    Vec x = x0;
    for (int k = 0; k < plan.count; ++k) x = detail::flow_step(sys, x, plan.h, pol);
    if (plan.last != 0.0) x = detail::flow_step(sys, x, plan.last, pol);
    if (!all_finite(x)) throw StepRejected("flow produced non-finite state");
    return x;
}

/// Tangent flow result plus the arrival point (frequently needed together).
struct TangentFlowPath {
    Mat M;
    Vec x_end;
    double t = 0.0;
    double symplectic_defect = 0.0;
    double energy_drift = 0.0;
};

/// Integrate the variational equation Ṁ = J·Hess(x(t))·M, M(0) = I, jointly
/// with the base trajectory.
inline TangentFlowPath tangent_flow_path(const HamiltonianSystem& sys, const Vec& x0, double t_final,
                                         const FlowPolicy& pol = {}) {
    if (!pol.allow_singular_start && !sys.is_regular(x0, pol.singular_tol))
        throw SingularStart("tangent_flow: start point is singular");
    const int d = sys.dim();
    const double e0 = sys.eval_h(x0);
    const auto plan = detail::plan_steps(t_final, pol.step);
    Vec x = x0;
    Mat M = Mat::Identity(d, d);
    double drift = 0.0;
    auto advance = [&](double h) {
        const Vec x_new = detail::flow_step(sys, x, h, pol);
        detail::tangent_step(sys, x, x_new, h, pol, M);
        x = x_new;
        if (!all_finite(x) || !M.allFinite()) throw StepRejected("tangent flow produced non-finite state");
        drift = std::max(drift, std::abs(sys.eval_h(x) - e0));
    };
    for (int k = 0; k < plan.count; ++k) advance(plan.h);
    if (plan.last != 0.0) advance(plan.last);
    TangentFlowPath out;
    out.M = std::move(M);
    out.x_end = std::move(x);
    out.t = t_final;
    out.symplectic_defect = symplectic_defect(out.M);
    out.energy_drift = drift;
    return out;
}

inline TangentFlowResult tangent_flow(const HamiltonianSystem& sys, const Vec& x0, double t_final,
                                      const FlowPolicy& pol = {}) {
    auto path = tangent_flow_path(sys, x0, t_final, pol);
    return TangentFlowResult{std::move(path.M), path.t, path.symplectic_defect};
}

}  // namespace hamshade
