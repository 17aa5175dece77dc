// poincare.hpp — orthonormal frames of the transversal bundle
// N_x = (span X_H(x))^⊥ ∩ ker ∇H_x, the transversal linear Poincaré flow
// Φ_H^t(x) expressed in those frames, and section return maps.
//
// Frame construction is deterministic: Gram–Schmidt over the standard basis
// after removing the X_H and ∇H directions, skipping the two standard
// vectors with the largest projections onto span{X_H, ∇H} (ties broken by
// lowest index). Along orbits frames are transported by re-orthonormalizing
// the pushforward of the previous frame, which avoids spurious sign flips
// when chaining cocycles.

#pragma once

#include "hamshade/flow.hpp"
#include "hamshade/hamsys.hpp"
#include "hamshade/types.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace hamshade {

struct TransversalFrame {
    Vec x;      // base point
    Mat basis;  // 2n x (2n-2), orthonormal columns spanning N_x
};

struct LinearPoincareMap {
    Mat P;  // (2n-2) x (2n-2)
    TransversalFrame frame_src, frame_dst;
    double t = 0.0;
    Mat omega_src, omega_dst;  // induced symplectic form in frame coordinates
};

struct AffineSection {
    Vec normal;        // length 2n
    double offset = 0.0;
    int direction = +1;  // sign of normal·X_H at accepted crossings

    double value(const Vec& x) const { return normal.dot(x) - offset; }

    /// Section through a given point, perpendicular to the flow there.
    static AffineSection through(const HamiltonianSystem& sys, const Vec& x) {
        Vec n = sys.field(x);
        const double norm = n.norm();
        if (norm == 0.0) throw SingularPoint("section through a singular point");
        n /= norm;
        return AffineSection{n, n.dot(x), +1};
    }
};

struct SectionReturn {
    Vec y;           // crossing point
    double tau = 0;  // return time > 0
    int crossings = 0;  // sign changes seen before accepting one
};

namespace detail {

/// Orthonormalize v against the accepted columns; returns false if v is
/// numerically in their span.
inline bool gram_schmidt_append(std::vector<Vec>& cols, Vec v) {
    for (int pass = 0; pass < 2; ++pass)
        for (const auto& c : cols) v -= c.dot(v) * c;
    const double nrm = v.norm();
    if (nrm < 1e-10) return false;
    cols.push_back(v / nrm);
    return true;
}

}  // namespace detail

/// Deterministic orthonormal basis of N_x. Throws SingularPoint at critical
/// points of H.
inline TransversalFrame transversal_frame(const HamiltonianSystem& sys, const Vec& x, double tol = 1e-8) {
    const int d = sys.dim();
    if (d < 4) throw DimensionMismatch("transversal_frame: needs n >= 2 (transversal bundle is trivial for n = 1)");
    const Vec g = sys.grad(x);
    if (g.norm() <= tol) throw SingularPoint("transversal_frame: ‖∇H‖ below tolerance");
    const Vec f = apply_J(g);

    std::vector<Vec> cols;
    cols.push_back(f / f.norm());
    {
        Vec u = g;
        for (int pass = 0; pass < 2; ++pass) u -= cols[0].dot(u) * cols[0];
        cols.push_back(u / u.norm());
    }

    // Skip the two standard vectors most aligned with span{X_H, ∇H}.
    std::vector<std::pair<double, int>> proj(d);
    for (int i = 0; i < d; ++i) {
        const double p = std::hypot(cols[0][i], cols[1][i]);
        proj[i] = {p, i};
    }
    auto by_size = proj;
    std::sort(by_size.begin(), by_size.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    const int skip1 = by_size[0].second, skip2 = by_size[1].second;

    for (int i = 0; i < d && static_cast<int>(cols.size()) < d; ++i) {
        if (i == skip1 || i == skip2) continue;
        detail::gram_schmidt_append(cols, Vec(Vec::Unit(d, i)));
    }
    // Degenerate skips can leave the basis short; sweep the skipped vectors.
    for (int i = 0; i < d && static_cast<int>(cols.size()) < d; ++i)
        detail::gram_schmidt_append(cols, Vec(Vec::Unit(d, i)));
    if (static_cast<int>(cols.size()) != d)
        throw Error("transversal_frame: failed to complete the basis");

    TransversalFrame out;
    out.x = x;
    out.basis.resize(d, d - 2);
    for (int c = 2; c < d; ++c) out.basis.col(c - 2) = cols[static_cast<size_t>(c)];
    return out;
}

/// Induced symplectic form in frame coordinates: Ω_ij = ω(b_i, b_j).
/// Skew-symmetric by construction (upper triangle mirrored exactly).
inline Mat induced_form(const TransversalFrame& frame) {
    const int m = static_cast<int>(frame.basis.cols());
    Mat omega = Mat::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        const Vec Jbi = apply_J(Vec(frame.basis.col(i)));
        for (int j = i + 1; j < m; ++j) {
            const double v = frame.basis.col(j).dot(Jbi) * -1.0;  // ω(b_i,b_j) = b_iᵀ J b_j = −b_jᵀ J b_i
            omega(i, j) = v;
            omega(j, i) = -v;
        }
    }
    if (std::abs(omega.determinant()) < 1e-12)
        throw DegenerateForm("induced_form: restriction of ω to the frame is degenerate");
    return omega;
}

/// Transport a frame along a tangent map: project the pushforward onto the
/// arrival transversal bundle and re-orthonormalize.
inline TransversalFrame transport_frame(const HamiltonianSystem& sys, const TransversalFrame& src, const Mat& M,
                                        const Vec& x_dst, double tol = 1e-8) {
    const Vec g = sys.grad(x_dst);
    if (g.norm() <= tol) throw SingularOnOrbit("transport_frame: singular arrival point");
    const Vec f = apply_J(g);
    std::vector<Vec> cols;
    cols.push_back(f / f.norm());
    {
        Vec u = g;
        for (int pass = 0; pass < 2; ++pass) u -= cols[0].dot(u) * cols[0];
        cols.push_back(u / u.norm());
    }
    const int m = static_cast<int>(src.basis.cols());
    for (int c = 0; c < m; ++c) {
        if (!detail::gram_schmidt_append(cols, Vec(M * src.basis.col(c))))
            throw SingularOnOrbit("transport_frame: pushforward lost rank");
    }
    TransversalFrame out;
    out.x = x_dst;
    out.basis.resize(sys.dim(), m);
    for (int c = 0; c < m; ++c) out.basis.col(c) = cols[static_cast<size_t>(c + 2)];
    return out;
}

/// Transversal linear Poincaré flow over time t as a matrix between the
/// canonical frames at x and X^t(x). Use the *_from variant with transported
/// frames when chaining long cocycles.
inline LinearPoincareMap linear_poincare(const HamiltonianSystem& sys, const Vec& x, double t,
                                         const FlowPolicy& pol = {}) {
    LinearPoincareMap out;
    out.frame_src = transversal_frame(sys, x, pol.singular_tol);
    const auto path = tangent_flow_path(sys, x, t, pol);
    out.frame_dst = transversal_frame(sys, path.x_end, pol.singular_tol);
    out.P = out.frame_dst.basis.transpose() * path.M * out.frame_src.basis;
    out.t = t;
    out.omega_src = induced_form(out.frame_src);
    out.omega_dst = induced_form(out.frame_dst);
    return out;
}

/// Chained variant: source frame given, destination frame transported along
/// the leg (re-orthonormalized pushforward, no spurious sign flips).
inline LinearPoincareMap linear_poincare_from(const HamiltonianSystem& sys, const TransversalFrame& src, double t,
                                              const FlowPolicy& pol = {}) {
    LinearPoincareMap out;
    out.frame_src = src;
    const auto path = tangent_flow_path(sys, src.x, t, pol);
    out.frame_dst = transport_frame(sys, src, path.M, path.x_end, pol.singular_tol);
    out.P = out.frame_dst.basis.transpose() * path.M * src.basis;
    out.t = t;
    out.omega_src = induced_form(out.frame_src);
    out.omega_dst = induced_form(out.frame_dst);
    return out;
}

/// ‖PᵀΩ_dst P − Ω_src‖ (max-abs): zero exactly when Φ is a linear
/// symplectomorphism for the induced form.
inline double poincare_symplectic_defect(const LinearPoincareMap& lp) {
    return (lp.P.transpose() * lp.omega_dst * lp.P - lp.omega_src).cwiseAbs().maxCoeff();
}

/// First strictly-positive-time transversal crossing of an affine section.
/// Sign changes are detected per fixed step, bracketed by bisection and
/// polished by Newton on s(x(t)).
inline SectionReturn section_return(const HamiltonianSystem& sys, const Vec& x, const AffineSection& section,
                                    const FlowPolicy& pol = {}, double t_max = 1e3) {
    const double fdot0 = section.normal.dot(sys.field(x));
    if (std::abs(fdot0) <= 1e-10 * section.normal.norm() * sys.field(x).norm())
        throw TangentialCrossing("section_return: flow tangent to the section at the start point");

    const double h = pol.step;
    Vec xk = x;
    double tk = 0.0;
    double sk = section.value(xk);
    int crossings = 0;
    const double crossing_tol = 1e-10;

    const int max_steps = static_cast<int>(std::ceil(t_max / h));
    for (int k = 0; k < max_steps; ++k) {
        const Vec xn = detail::flow_step(sys, xk, h, pol);
        const double tn = tk + h;
        const double sn = section.value(xn);
        // Strict sign change; crossings located before half a step are treated
        // as the departure of an on-section start, not a return.
        if (sk * sn < 0 && tn >= 0.5 * h) {
            ++crossings;
            // Bisection inside [0, h] from xk, then Newton polish on tau.
            double lo = 0.0, hi = h, slo = sk;
            for (int it = 0; it < 60 && (hi - lo) > 1e-15 * std::max(1.0, h); ++it) {
                const double mid = 0.5 * (lo + hi);
                const double smid = section.value(detail::flow_step(sys, xk, mid, pol));
                if ((slo < 0) == (smid < 0)) {
                    lo = mid;
                    slo = smid;
                } else {
                    hi = mid;
                }
            }
            double tau = 0.5 * (lo + hi);
            Vec y = detail::flow_step(sys, xk, tau, pol);
            for (int it = 0; it < 8; ++it) {
                const double sv = section.value(y);
                const double sd = section.normal.dot(sys.field(y));
                if (sd == 0.0) break;
                const double dt = -sv / sd;
                tau += dt;
                if (tau <= 0 || tau >= h * 1.5) break;
                y = detail::flow_step(sys, xk, tau, pol);
                if (std::abs(section.value(y)) <= crossing_tol) break;
            }
            const double deriv = section.normal.dot(sys.field(y));
            if (std::abs(section.value(y)) <= crossing_tol && tk + tau >= 0.5 * h) {
                if (std::abs(deriv) <= 1e-8 * section.normal.norm() * sys.field(y).norm())
                    throw TangentialCrossing("section_return: transversality fails at the located crossing");
                if ((section.direction > 0) == (deriv > 0)) {
                    SectionReturn out;
                    out.y = y;
                    out.tau = tk + tau;
                    out.crossings = crossings;
                    return out;
                }
            }
        }
        xk = xn;
        tk = tn;
        sk = sn;
    }
    throw NoReturn("section_return: no transversal crossing within the time budget");
}

}  // namespace hamshade
