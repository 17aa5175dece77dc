// hamsys.hpp — Hamiltonian systems on R^{2n} with the standard symplectic
// structure: evaluators for H, ∇H and the Hessian, a builtin catalogue, and
// suspension flows over discrete base maps.
//
// Phase points are stored as (q_1..q_n, p_1..p_n) in model units. The field
// is X_H = J·∇H, so energy is a first integral at the field level.

#pragma once

#include "hamshade/types.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hamshade {

/// One monomial coeff · Π x_i^{powers_i} of a polynomial Hamiltonian.
struct PolyTerm {
    double coeff = 0.0;
    std::vector<int> powers;  // length 2n, nonnegative
};

namespace detail {

inline double eval_poly(const std::vector<PolyTerm>& terms, const Vec& x) {
    double acc = 0.0;
    for (const auto& t : terms) {
        double m = t.coeff;
        for (size_t i = 0; i < t.powers.size(); ++i) {
            for (int k = 0; k < t.powers[i]; ++k) m *= x[static_cast<int>(i)];
        }
        acc += m;
    }
    return acc;
}

/// d/dx_j of a term list, as a new term list.
inline std::vector<PolyTerm> diff_poly(const std::vector<PolyTerm>& terms, int j) {
    std::vector<PolyTerm> out;
    for (const auto& t : terms) {
        if (t.powers[j] == 0) continue;
        PolyTerm d = t;
        d.coeff *= t.powers[j];
        d.powers[j] -= 1;
        if (d.coeff != 0.0) out.push_back(std::move(d));
    }
    return out;
}

}  // namespace detail

/**
 * A Hamiltonian system: n degrees of freedom, an energy evaluator, and
 * optional analytic gradient/Hessian. When the analytic gradient is missing,
 * 4th-order central differences with step cbrt(eps)·max(1, ‖x‖) are used;
 * the Hessian falls back to central differences of the gradient.
 *
 * n = 1 is rejected unless the system was constructed with allow_n1 (used by
 * the one-degree-of-freedom cubic example below, where the transversal
 * machinery does not apply).
 */
class HamiltonianSystem {
public:
    using Evaluator = std::function<double(const Vec&)>;
    using GradEvaluator = std::function<Vec(const Vec&)>;
    using HessEvaluator = std::function<Mat(const Vec&)>;

    HamiltonianSystem(std::string name, int n, Evaluator h, GradEvaluator grad = nullptr,
                      HessEvaluator hess = nullptr, bool allow_n1 = false, bool separable = false)
        : name_(std::move(name)),
          n_(n),
          h_(std::move(h)),
          grad_(std::move(grad)),
          hess_(std::move(hess)),
          allow_n1_(allow_n1),
          separable_(separable) {
        if (n_ < 1 || (n_ == 1 && !allow_n1_))
            throw DimensionMismatch("HamiltonianSystem: n must be >= 2 (n = 1 requires the documented flag)");
        if (!h_) throw GradientUnavailable("HamiltonianSystem: energy evaluator required");
    }

    /// Builds a system from polynomial terms; gradient and Hessian are exact
    /// term-wise derivatives.
    static HamiltonianSystem from_polynomial(std::string name, int n, std::vector<PolyTerm> terms,
                                             bool allow_n1 = false, bool separable = false) {
        const int d = 2 * n;
        for (const auto& t : terms)
            if (static_cast<int>(t.powers.size()) != d)
                throw DimensionMismatch("from_polynomial: powers length must be 2n");

        std::vector<std::vector<PolyTerm>> grads(d);
        std::vector<std::vector<std::vector<PolyTerm>>> hess(d, std::vector<std::vector<PolyTerm>>(d));
        for (int i = 0; i < d; ++i) {
            grads[i] = detail::diff_poly(terms, i);
            for (int j = 0; j <= i; ++j) hess[i][j] = detail::diff_poly(grads[i], j);
        }

        auto h = [terms](const Vec& x) { return detail::eval_poly(terms, x); };
        auto g = [grads, d](const Vec& x) {
            Vec out(d);
            for (int i = 0; i < d; ++i) out[i] = detail::eval_poly(grads[i], x);
            return out;
        };
        auto hs = [hess, d](const Vec& x) {
            Mat out(d, d);
            for (int i = 0; i < d; ++i)
                for (int j = 0; j <= i; ++j) out(i, j) = out(j, i) = detail::eval_poly(hess[i][j], x);
            return out;
        };
        HamiltonianSystem sys(std::move(name), n, h, g, hs, allow_n1, separable);
        sys.terms_ = std::move(terms);
        return sys;
    }

    const std::string& name() const { return name_; }
    int dof() const { return n_; }
    int dim() const { return 2 * n_; }
    bool separable() const { return separable_; }
    bool has_analytic_gradient() const { return static_cast<bool>(grad_); }
    bool has_analytic_hessian() const { return static_cast<bool>(hess_); }

    /// Polynomial terms when the system was built from them (empty otherwise).
    const std::vector<PolyTerm>& polynomial_terms() const { return terms_; }

    /// H(x). Throws DimensionMismatch for wrong-sized points.
    double eval_h(const Vec& x) const {
        check_point(x);
        return h_(x);
    }

    /// ∇H(x), analytic when available, else 4th-order central differences.
    Vec grad(const Vec& x) const {
        check_point(x);
        if (grad_) return grad_(x);
        return fd_gradient(x);
    }

    /// Hess H(x), analytic when available, else central differences of grad.
    Mat hess(const Vec& x) const {
        check_point(x);
        if (hess_) return hess_(x);
        return fd_hessian(x);
    }

    /// X_H(x) = J·∇H(x).
    Vec field(const Vec& x) const { return apply_J(grad(x)); }

    /// True iff ‖∇H(x)‖ > tol. Equivalent to ‖X_H(x)‖ > tol since J is an isometry.
    bool is_regular(const Vec& x, double tol = 1e-8) const {
        if (tol <= 0) throw Error("is_regular: tol must be positive");
        return grad(x).norm() > tol;
    }

private:
    void check_point(const Vec& x) const {
        if (static_cast<int>(x.size()) != dim())
            throw DimensionMismatch("phase point has length " + std::to_string(x.size()) +
                                    ", expected " + std::to_string(dim()));
        if (!all_finite(x)) throw Error("phase point has non-finite entries");
    }

    Vec fd_gradient(const Vec& x) const {
        const double eps = std::numeric_limits<double>::epsilon();
        const double h = std::cbrt(eps) * std::max(1.0, x.norm());
        const int d = dim();
        Vec g(d);
        Vec xp = x;
        for (int i = 0; i < d; ++i) {
            const double xi = x[i];
            auto at = [&](double off) {
                xp[i] = xi + off;
                const double v = h_(xp);
                xp[i] = xi;
                return v;
            };
            g[i] = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        }
        return g;
    }

    Mat fd_hessian(const Vec& x) const {
        const double eps = std::numeric_limits<double>::epsilon();
        const double h = std::cbrt(eps) * std::max(1.0, x.norm());
        const int d = dim();
        Mat H(d, d);
        Vec xp = x;
        for (int j = 0; j < d; ++j) {
            const double xj = x[j];
            xp[j] = xj + h;
            const Vec gp = grad_ ? grad_(xp) : fd_gradient(xp);
            xp[j] = xj - h;
            const Vec gm = grad_ ? grad_(xp) : fd_gradient(xp);
            xp[j] = xj;
            H.col(j) = (gp - gm) / (2 * h);
        }
        return 0.5 * (H + H.transpose());
    }

    std::string name_;
    int n_;
    Evaluator h_;
    GradEvaluator grad_;
    HessEvaluator hess_;
    bool allow_n1_ = false;
    bool separable_ = false;
    std::vector<PolyTerm> terms_;
};

/// Max over samples of ‖X_H(R·x) − R·X_H(x)‖ — the equivariance defect of a
/// linear candidate symmetry R.
inline double symmetry_defect(const HamiltonianSystem& sys, const Mat& R, const std::vector<Vec>& samples) {
    if (R.rows() != sys.dim() || R.cols() != sys.dim())
        throw DimensionMismatch("symmetry_defect: R must be 2n x 2n");
    Eigen::FullPivLU<Mat> lu(R);
    if (!lu.isInvertible()) throw Error("symmetry_defect: R must be invertible");
    double worst = 0.0;
    for (const auto& x : samples) {
        const Vec lhs = sys.field(R * x);
        const Vec rhs = R * sys.field(x);
        worst = std::max(worst, (lhs - rhs).norm());
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Builtin catalogue
// ---------------------------------------------------------------------------

namespace detail {

inline PolyTerm term(double c, std::vector<int> p) { return PolyTerm{c, std::move(p)}; }

}  // namespace detail

/// One-degree-of-freedom cubic H(x, y) = x^3 − 3 x y^2, with the degenerate
/// singularity at the origin and the 2π/3 rotational symmetry.
inline HamiltonianSystem make_pedro() {
    using detail::term;
    return HamiltonianSystem::from_polynomial(
        "pedro", 1, {term(1.0, {3, 0}), term(-3.0, {1, 2})}, /*allow_n1=*/true);
}

/// 2-DOF harmonic oscillator H = ½ Σ (q_i² + p_i²).
inline HamiltonianSystem make_harmonic() {
    using detail::term;
    return HamiltonianSystem::from_polynomial(
        "harmonic", 2,
        {term(0.5, {2, 0, 0, 0}), term(0.5, {0, 2, 0, 0}), term(0.5, {0, 0, 2, 0}), term(0.5, {0, 0, 0, 2})},
        /*allow_n1=*/false, /*separable=*/true);
}

/// Hénon–Heiles H = ½(p₁²+p₂²) + ½(q₁²+q₂²) + q₁²q₂ − q₂³/3.
inline HamiltonianSystem make_henon_heiles() {
    using detail::term;
    return HamiltonianSystem::from_polynomial(
        "henon-heiles", 2,
        {term(0.5, {0, 0, 2, 0}), term(0.5, {0, 0, 0, 2}), term(0.5, {2, 0, 0, 0}), term(0.5, {0, 2, 0, 0}),
         term(1.0, {2, 1, 0, 0}), term(-1.0 / 3.0, {0, 3, 0, 0})},
        /*allow_n1=*/false, /*separable=*/true);
}

/// Saddle-center H = q₁p₁ + ½(q₂² + p₂²): hyperbolic (q₁,p₁) factor times an
/// elliptic (q₂,p₂) factor.
inline HamiltonianSystem make_saddle_center() {
    using detail::term;
    return HamiltonianSystem::from_polynomial(
        "saddle-center", 2, {term(1.0, {1, 0, 1, 0}), term(0.5, {0, 2, 0, 0}), term(0.5, {0, 0, 0, 2})});
}

/// Hamiltonian builtins by name; throws on unknown names.
inline HamiltonianSystem make_builtin(const std::string& name) {
    if (name == "pedro") return make_pedro();
    if (name == "harmonic") return make_harmonic();
    if (name == "henon-heiles") return make_henon_heiles();
    if (name == "saddle-center") return make_saddle_center();
    throw Error("unknown builtin system: " + name);
}

// ---------------------------------------------------------------------------
// Suspension flows
// ---------------------------------------------------------------------------

/**
 * Suspension flow over a discrete base map f with ceiling function h ≥ β > 0.
 * States are (x, r) with 0 ≤ r < h(x); flowing by s applies
 *   S^s(x, r) = (f^n(x), r + s − Σ_{i<n} h(f^i(x)))
 * with n the unique integer making the roof coordinate land in [0, h(f^n x)).
 * Negative s requires the base-map inverse.
 */
class SuspensionSystem {
public:
    using BaseMap = std::function<Vec(const Vec&)>;
    using Ceiling = std::function<double(const Vec&)>;

    SuspensionSystem(std::string name, BaseMap map, BaseMap inverse, Ceiling ceiling, double beta)
        : name_(std::move(name)),
          map_(std::move(map)),
          inverse_(std::move(inverse)),
          ceiling_(std::move(ceiling)),
          beta_(beta) {
        if (beta_ <= 0) throw Error("SuspensionSystem: ceiling lower bound beta must be positive");
    }

    const std::string& name() const { return name_; }
    double beta() const { return beta_; }
    bool has_inverse() const { return static_cast<bool>(inverse_); }

    double ceiling(const Vec& x) const {
        const double c = ceiling_(x);
        if (c < beta_) throw Error("SuspensionSystem: ceiling below beta at a sampled point");
        return c;
    }

    /// Flow the state (x, r) by time s (s may be negative with an inverse).
    std::pair<Vec, double> flow(const Vec& x0, double r0, double s) const {
        if (r0 < 0 || r0 >= ceiling(x0)) throw Error("suspension state: roof coordinate out of range");
        Vec x = x0;
        double r = r0 + s;
        while (r >= ceiling(x)) {
            r -= ceiling(x);
            x = map_(x);
        }
        while (r < 0) {
            if (!inverse_) throw InverseUnavailable("suspension flow: negative time needs the base-map inverse");
            x = inverse_(x);
            r += ceiling(x);
        }
        return {x, r};
    }

private:
    std::string name_;
    BaseMap map_;
    BaseMap inverse_;
    Ceiling ceiling_;
    double beta_;
};

/// Arnold cat map suspension on the 2-torus with ceiling ≡ 1.
inline SuspensionSystem make_cat_suspension() {
    auto wrap = [](double v) {
        double w = std::fmod(v, 1.0);
        return w < 0 ? w + 1.0 : w;
    };
    auto fwd = [wrap](const Vec& x) {
        Vec y(2);
        y << wrap(2 * x[0] + x[1]), wrap(x[0] + x[1]);
        return y;
    };
    auto inv = [wrap](const Vec& x) {
        Vec y(2);
        y << wrap(x[0] - x[1]), wrap(-x[0] + 2 * x[1]);
        return y;
    };
    auto ceil1 = [](const Vec&) { return 1.0; };
    return SuspensionSystem("cat-suspension", fwd, inv, ceil1, 1.0);
}

}  // namespace hamshade
