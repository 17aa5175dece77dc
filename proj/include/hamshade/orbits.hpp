// orbits.hpp — periodic orbits by Newton iteration on section return maps,
// monodromy of the transversal linear Poincaré flow, classification into
// hyperbolic / k-elliptic / degenerate via reciprocal-conjugate eigenvalue
// groups, and the linear spectral-nudge sandbox.

#pragma once

#include "hamshade/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hamshade {

enum class OrbitClass { Hyperbolic, Elliptic, Degenerate };

struct Classification {
    OrbitClass kind = OrbitClass::Degenerate;
    int k = 0;  // number of unit-circle conjugate pairs when elliptic

    std::string str() const {
        switch (kind) {
            case OrbitClass::Hyperbolic:
                return "hyperbolic";
            case OrbitClass::Elliptic:
                return std::to_string(k) + "-elliptic";
            case OrbitClass::Degenerate:
                return "degenerate";
        }
        return "degenerate";
    }
};

struct PeriodicOrbit {
    Vec p;            // point on the orbit
    double period = 0.0;
    Mat monodromy;    // (2n-2) x (2n-2) transversal monodromy at p
    double residual = 0.0;  // ‖X^period(p) − p‖
    Classification classification;
};

struct SpectrumQuadruples {
    std::vector<std::vector<std::complex<double>>> groups;  // closed under 1/σ and conj
    double unit_band = 0.0;       // τ_u used for |.|σ|−1| classification
    double pairing_defect = 0.0;  // max |σ·σ'−1| over matched reciprocal pairs
};

struct NewtonPolicy {
    int max_newton = 30;
    double tol = 1e-9;        // residual target for ‖X^T(p) − p‖
    double fd_step = 1e-7;    // finite-difference scale for the return-map Jacobian
    double section_time_cap = 1e3;
};

// ---------------------------------------------------------------------------
// Eigenvalue quadruples and classification
// ---------------------------------------------------------------------------

/// Spectrum of a (numerically) symplectic matrix grouped into orbits of
/// σ ↦ 1/σ and σ ↦ conj(σ). The pairing defect reports how far matched
/// reciprocal pairs are from σ·σ' = 1.
inline SpectrumQuadruples eigen_quadruples(const Mat& A, double unit_band = 1e-6) {
    if (A.rows() != A.cols()) throw DimensionMismatch("eigen_quadruples: matrix must be square");
    if (!A.allFinite()) throw EigenFailure("eigen_quadruples: non-finite entries");
    Eigen::EigenSolver<Mat> solver(A);
    if (solver.info() != Eigen::Success) throw EigenFailure("eigen_quadruples: eigensolver failed");

    std::vector<std::complex<double>> ev(static_cast<size_t>(A.rows()));
    for (int i = 0; i < A.rows(); ++i) ev[static_cast<size_t>(i)] = solver.eigenvalues()[i];
    // deterministic processing order: by modulus descending, then argument
    std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (ma != mb) return ma > mb;
        return std::arg(a) < std::arg(b);
    });

    std::vector<bool> used(ev.size(), false);

    SpectrumQuadruples out;
    out.unit_band = unit_band;
    const double imag_tol = 10 * unit_band;
    for (size_t i = 0; i < ev.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        std::vector<std::complex<double>> group{ev[i]};

        // Close the group under conj and reciprocal. Each member's target is
        // matched against whichever is closer: an existing group member (the
        // target is already covered) or the closest unused eigenvalue.
        for (size_t g = 0; g < group.size() && group.size() < ev.size(); ++g) {
            const std::complex<double> m = group[g];
            std::vector<std::pair<std::complex<double>, bool>> targets;  // (target, is_reciprocal)
            if (std::abs(m.imag()) > imag_tol) targets.emplace_back(std::conj(m), false);
            targets.emplace_back(1.0 / m, true);
            for (const auto& [target, recip] : targets) {
                double best_existing = std::numeric_limits<double>::infinity();
                std::complex<double> existing_val;
                for (const auto& e : group) {
                    const double d = std::abs(e - target);
                    if (d < best_existing) {
                        best_existing = d;
                        existing_val = e;
                    }
                }
                double best_unused = std::numeric_limits<double>::infinity();
                size_t idx = 0;
                for (size_t j = 0; j < ev.size(); ++j) {
                    if (used[j]) continue;
                    const double d = std::abs(ev[j] - target);
                    if (d < best_unused) {
                        best_unused = d;
                        idx = j;
                    }
                }
                if (best_unused < best_existing) {
                    used[idx] = true;
                    group.push_back(ev[idx]);
                    if (recip) out.pairing_defect = std::max(out.pairing_defect, std::abs(m * ev[idx] - 1.0));
                } else if (recip && std::isfinite(best_existing)) {
                    out.pairing_defect = std::max(out.pairing_defect, std::abs(m * existing_val - 1.0));
                }
            }
        }
        out.groups.push_back(std::move(group));
    }
    return out;
}

/// Classify a symplectic monodromy per its unit-circle spectrum structure:
/// hyperbolic when no eigenvalue lies in the unit band; k-elliptic when
/// exactly 2k simple non-real eigenvalues lie in the band and all others are
/// outside; degenerate otherwise.
inline Classification classify_monodromy(const Mat& monodromy, double unit_band = 1e-6) {
    Eigen::EigenSolver<Mat> solver(monodromy);
    if (solver.info() != Eigen::Success) throw EigenFailure("classify: eigensolver failed");
    std::vector<std::complex<double>> ev(static_cast<size_t>(monodromy.rows()));
    for (int i = 0; i < monodromy.rows(); ++i) ev[static_cast<size_t>(i)] = solver.eigenvalues()[i];

    const double sep_tol = 10 * unit_band;
    int on_circle = 0;
    bool bad = false;
    for (size_t i = 0; i < ev.size(); ++i) {
        if (std::abs(std::abs(ev[i]) - 1.0) > unit_band) continue;
        ++on_circle;
        if (std::abs(ev[i].imag()) < sep_tol) bad = true;  // real unit eigenvalue
        for (size_t j = 0; j < ev.size(); ++j)
            if (j != i && std::abs(ev[i] - ev[j]) < sep_tol) bad = true;  // not simple
    }
    Classification out;
    if (on_circle == 0) {
        out.kind = OrbitClass::Hyperbolic;
    } else if (!bad && on_circle % 2 == 0) {
        out.kind = OrbitClass::Elliptic;
        out.k = on_circle / 2;
    } else {
        out.kind = OrbitClass::Degenerate;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Periodic orbit search
// ---------------------------------------------------------------------------

namespace detail {

/// Orthonormal basis of {section normal, ∇H(x)}^⊥ — the local coordinates of
/// the energy-restricted section.
inline Mat section_energy_basis(const HamiltonianSystem& sys, const AffineSection& sec, const Vec& x) {
    const int d = sys.dim();
    std::vector<Vec> cols;
    cols.push_back(sec.normal / sec.normal.norm());
    Vec g = sys.grad(x);
    for (int pass = 0; pass < 2; ++pass) g -= cols[0].dot(g) * cols[0];
    if (g.norm() < 1e-12) throw SingularJacobian("section basis: ∇H parallel to the section normal");
    cols.push_back(g / g.norm());
    for (int i = 0; i < d && static_cast<int>(cols.size()) < d; ++i)
        gram_schmidt_append(cols, Vec(Vec::Unit(d, i)));
    Mat B(d, d - 2);
    for (int c = 2; c < d; ++c) B.col(c - 2) = cols[static_cast<size_t>(c)];
    return B;
}

}  // namespace detail

/**
 * Newton search for a periodic orbit through the section near the seed.
 * The fixed-point equation of the return map is solved in the (2n−2)
 * coordinates orthogonal to both the section normal and ∇H, so families of
 * orbits across energy levels do not make the Jacobian singular. The period
 * is the accumulated return time.
 */
inline PeriodicOrbit find_periodic(const HamiltonianSystem& sys, const Vec& seed, const AffineSection& section,
                                   const NewtonPolicy& npol = {}, const FlowPolicy& fpol = {}) {
    if (!sys.is_regular(seed, fpol.singular_tol)) throw SingularStart("find_periodic: seed is singular");
    Vec y = seed;
    // put the seed exactly on the section
    y -= section.normal * (section.value(y) / section.normal.squaredNorm());
    const double energy = sys.eval_h(seed);

    double period = 0.0;
    double residual = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= npol.max_newton; ++it) {
        const auto ret = section_return(sys, y, section, fpol, npol.section_time_cap);
        period = ret.tau;
        residual = (ret.y - y).norm();
        if (residual <= npol.tol) break;
        if (it == npol.max_newton)
            throw NoConvergence("find_periodic: residual " + std::to_string(residual) + " after " +
                                std::to_string(npol.max_newton) + " Newton steps");

        const Mat B = detail::section_energy_basis(sys, section, y);
        const int m = static_cast<int>(B.cols());
        const Vec G0 = B.transpose() * (ret.y - y);
        Mat Jac(m, m);
        const double step = npol.fd_step * std::max(1.0, y.norm());
        for (int c = 0; c < m; ++c) {
            const Vec yp = y + step * B.col(c);
            const auto retp = section_return(sys, yp, section, fpol, npol.section_time_cap);
            Jac.col(c) = (B.transpose() * (retp.y - yp) - G0) / step;
        }
        Eigen::JacobiSVD<Mat> svd(Jac, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const auto& sing = svd.singularValues();
        if (sing[m - 1] <= 1e-6 * std::max(1.0, sing[0]))
            throw SingularJacobian("find_periodic: I − DP is numerically singular (eigenvalue 1?)");
        const Vec dc = svd.solve(-G0);
        y += B * dc;
        // restore the section and energy constraints (both drift at second order)
        y -= section.normal * (section.value(y) / section.normal.squaredNorm());
        for (int corr = 0; corr < 3; ++corr) {
            const Vec g = sys.grad(y);
            const double de = sys.eval_h(y) - energy;
            if (std::abs(de) < 1e-14 * std::max(1.0, std::abs(energy))) break;
            y -= g * (de / g.squaredNorm());
        }
    }

    PeriodicOrbit orbit;
    orbit.p = y;
    orbit.period = period;
    orbit.residual = residual;
    orbit.monodromy = linear_poincare(sys, y, period, fpol).P;
    orbit.classification = classify_monodromy(orbit.monodromy, 1e-4);
    return orbit;
}

// ---------------------------------------------------------------------------
// Spectral nudge (2x2 symplectic blocks)
// ---------------------------------------------------------------------------

namespace detail {

/// exp(s·G) for traceless 2x2 G, in closed form.
inline Mat exp_traceless_2x2(const Mat& G, double s) {
    const double det = G.determinant();
    Mat out(2, 2);
    if (det > 1e-300) {
        const double w = std::sqrt(det);
        out = std::cos(w * s) * Mat::Identity(2, 2) + (std::sin(w * s) / w) * G;
    } else if (det < -1e-300) {
        const double w = std::sqrt(-det);
        out = std::cosh(w * s) * Mat::Identity(2, 2) + (std::sinh(w * s) / w) * G;
    } else {
        out = Mat::Identity(2, 2) + s * G;
    }
    return out;
}

inline double opnorm(const Mat& A) {
    Eigen::JacobiSVD<Mat> svd(A);
    return svd.singularValues()[0];
}

/// Nudge one 2x2 symplectic block toward the unit circle within operator-norm
/// budget delta; nullopt when unreachable.
inline std::optional<Mat> nudge_block(const Mat& A, double delta) {
    const double tr = A.trace();
    if (std::abs(tr) <= 2.0) return A;  // already has unit-modulus spectrum

    // Steepest trace-descent generator in sp(2): tr(A·G) with G traceless is
    // g1(a−d) + g2 c + g3 b, maximized by G* below.
    Mat G(2, 2);
    G << A(0, 0) - A(1, 1), A(1, 0), A(0, 1), -(A(0, 0) - A(1, 1));
    const double gnorm = G.norm();
    if (gnorm < 1e-14) return std::nullopt;  // A = ±I-like, |tr| <= 2 handled above
    G /= gnorm;

    auto at = [&](double s) { return Mat(A * exp_traceless_2x2(G, s)); };
    auto abs_trace_at = [&](double s) { return std::abs(at(s).trace()); };
    auto norm_at = [&](double s) { return opnorm(at(s) - A); };

    // pick the descent direction for |trace|
    double side = 0.0;
    const double probe = 1e-6;
    if (abs_trace_at(probe) < std::abs(tr)) side = 1.0;
    else if (abs_trace_at(-probe) < std::abs(tr)) side = -1.0;
    else return std::nullopt;

    // largest budget-feasible |s| by bisection on the norm
    double lo = 0.0, hi = 1.0;
    while (norm_at(side * hi) < delta && hi < 64.0) hi *= 2.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (norm_at(side * mid) <= delta ? lo : hi) = mid;
    }
    const double s_max = lo;

    double s_land;
    if (abs_trace_at(s_max * side) <= 2.0) {
        // trace crosses the boundary: bisect, keeping the inside endpoint
        lo = 0.0;
        hi = s_max;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (abs_trace_at(side * mid) <= 2.0 ? hi : lo) = mid;
        }
        s_land = hi;
    } else {
        // |trace| may only touch 2 tangentially along this geodesic (normal
        // shapes); land on the minimum if it reaches the boundary
        lo = 0.0;
        hi = s_max;
        for (int it = 0; it < 200; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (abs_trace_at(side * m1) < abs_trace_at(side * m2)) hi = m2;
            else lo = m1;
        }
        s_land = 0.5 * (lo + hi);
    }

    Mat out = at(side * s_land);
    // pull strictly inside with small rotation steps: trace(A'·R(phi)) =
    // tr(A')·cos(phi) + tr(A'J)·sin(phi) shrinks |trace| near tangency
    Mat rotJ(2, 2);
    rotJ << 0, 1, -1, 0;
    double phi = 1e-12;
    while (std::abs(out.trace()) > 2.0 && phi < 1e-2) {
        const Mat cand1 = out * exp_traceless_2x2(rotJ, phi);
        const Mat cand2 = out * exp_traceless_2x2(rotJ, -phi);
        const Mat& better = std::abs(cand1.trace()) <= std::abs(cand2.trace()) ? cand1 : cand2;
        if (std::abs(better.trace()) < std::abs(out.trace())) out = better;
        phi *= 4.0;
    }
    if (std::abs(out.trace()) > 2.0) return std::nullopt;
    if (opnorm(out - A) > delta) return std::nullopt;
    return out;
}

}  // namespace detail

/**
 * Perturb a symplectic matrix (2x2, or block-diagonal with 2x2 blocks) by at
 * most delta in operator norm so that at least one eigenvalue has modulus
 * one. The perturbation stays inside Sp(2) exactly: A' = A·exp(s·J·S) with S
 * symmetric, s found by bisection on the trace. Throws NudgeOutOfReach when
 * the spectrum is too far from the circle for the budget.
 */
inline Mat spectral_nudge(const Mat& A, double delta) {
    if (delta <= 0) throw Error("spectral_nudge: delta must be positive");
    if (A.rows() != A.cols() || A.rows() % 2 != 0)
        throw DimensionMismatch("spectral_nudge: even square matrix required");

    const int m = static_cast<int>(A.rows());
    if (m > 2) {
        // block-diagonal composition of 2x2 symplectic factors (symplectic
        // for the block form diag(J2, ..., J2)): verify the structure, then
        // nudge the first block that can reach the circle
        for (int i = 0; i < m; i += 2) {
            Mat off = A;
            off.block(i, i, 2, 2).setZero();
            Mat rows = off.middleRows(i, 2);
            Mat cols = off.middleCols(i, 2);
            if (rows.cwiseAbs().maxCoeff() > 1e-12 || cols.cwiseAbs().maxCoeff() > 1e-12)
                throw Error("spectral_nudge: only 2x2 blocks and block-diagonal compositions are supported");
            if (std::abs(A.block(i, i, 2, 2).determinant() - 1.0) > 1e-10)
                throw Error("spectral_nudge: block is not symplectic (det != 1)");
        }
        for (int i = 0; i < m; i += 2) {
            const Mat blk = A.block(i, i, 2, 2);
            if (auto nudged = detail::nudge_block(blk, delta)) {
                Mat out = A;
                out.block(i, i, 2, 2) = *nudged;
                return out;
            }
        }
        throw NudgeOutOfReach("spectral_nudge: no block reaches the unit circle within delta");
    }

    if (symplectic_defect(A) > 1e-10) throw Error("spectral_nudge: input is not symplectic (defect > 1e-10)");
    if (auto nudged = detail::nudge_block(A, delta)) return *nudged;
    throw NudgeOutOfReach("spectral_nudge: spectrum too far from the unit circle for delta");
}

// ---------------------------------------------------------------------------
// Rational rotation approximation
// ---------------------------------------------------------------------------

/**
 * Minimal-denominator fraction p/q with |2π p/q − θ| ≤ delta, found by
 * walking continued-fraction convergents and semiconvergents of θ/(2π).
 */
inline std::pair<std::int64_t, std::int64_t> rationalize_rotation(double theta, double delta) {
    if (delta <= 0) throw Error("rationalize_rotation: delta must be positive");
    const double x = theta / (2.0 * M_PI);
    const double tol = delta / (2.0 * M_PI);

    auto err = [&](std::int64_t p, std::int64_t q) { return std::abs(x - static_cast<double>(p) / static_cast<double>(q)); };

    // convergent recurrence p_k = a_k p_{k-1} + p_{k-2}
    std::int64_t pm1 = 1, qm1 = 0;  // p_{-1}/q_{-1}
    std::int64_t p0 = static_cast<std::int64_t>(std::floor(x)), q0 = 1;
    if (err(p0, q0) <= tol) return {p0, q0};
    double frac = x - std::floor(x);
    for (int it = 0; it < 64; ++it) {
        if (frac < 1e-18) break;
        const double inv = 1.0 / frac;
        const double a_real = std::floor(inv);
        if (a_real > 9e15) break;
        const auto a = static_cast<std::int64_t>(a_real);
        frac = inv - a_real;

        // semiconvergents m·p0 + pm1 for m = 1..a; error decreases in m, so
        // binary-search the smallest feasible m
        std::int64_t lo = 1, hi = a;
        if (err(a * p0 + pm1, a * q0 + qm1) > tol) {
            // not even the full convergent reaches the tolerance; advance
            const std::int64_t pn = a * p0 + pm1, qn = a * q0 + qm1;
            pm1 = p0;
            qm1 = q0;
            p0 = pn;
            q0 = qn;
            continue;
        }
        while (lo < hi) {
            const std::int64_t mid = lo + (hi - lo) / 2;
            if (err(mid * p0 + pm1, mid * q0 + qm1) <= tol) hi = mid;
            else lo = mid + 1;
        }
        return {lo * p0 + pm1, lo * q0 + qm1};
    }
    return {p0, q0};
}

}  // namespace hamshade
