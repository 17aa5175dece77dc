// spectra.hpp — transversal Lyapunov exponents along orbits via periodically
// re-orthonormalized frame cocycles (QR of the pushed-forward transversal
// frame), plus the symplectic pairing and zero-sum diagnostics.

#pragma once

#include "hamshade/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace hamshade {

struct LyapunovSpectrum {
    std::vector<double> exponents;  // sorted non-increasing, length 2n-2 (or 2n in full-tangent mode)
    double T = 0.0;
    double renorm_interval = 0.0;
    double pairing_defect = 0.0;  // max_i |λ_i + λ_mirror(i)| over the sorted exponents
    double sum_defect = 0.0;      // |Σ λ_i|
};

struct LyapunovPolicy {
    double renorm = 1.0;   // time between QR re-orthonormalizations
    double step = 1e-3;
    double escape_radius = 1e3;  // bounded working region; leaving it is OrbitEscaped
    bool full_tangent = false;   // debug: report all 2n exponents (no transversal projection)
    // optional progress sink: called after each renormalization with
    // (t, running exponent estimates sorted non-increasing)
    std::function<void(double, const std::vector<double>&)> progress;
};

/// Pairing and zero-sum defects of a sorted exponent list.
inline void spectrum_diagnostics(LyapunovSpectrum& spec) {
    const size_t m = spec.exponents.size();
    double pairing = 0.0, sum = 0.0;
    for (size_t i = 0; i < m; ++i) {
        sum += spec.exponents[i];
        pairing = std::max(pairing, std::abs(spec.exponents[i] + spec.exponents[m - 1 - i]));
    }
    spec.pairing_defect = pairing;
    spec.sum_defect = std::abs(sum);
}

/// Λ_i = λ_1 + ... + λ_i (1-based i): top growth rate of i-dimensional volume.
inline double volume_growth(const LyapunovSpectrum& spec, int i) {
    if (i < 1 || i > static_cast<int>(spec.exponents.size()))
        throw IndexOutOfRange("volume_growth: index must be in [1, number of exponents]");
    double acc = 0.0;
    for (int k = 0; k < i; ++k) acc += spec.exponents[static_cast<size_t>(k)];
    return acc;
}

/**
 * Transversal Lyapunov spectrum along the forward orbit of x0 over [0, T].
 * Frames are transported with the tangent flow, projected back onto the
 * transversal bundle and re-orthonormalized every policy.renorm time units;
 * exponents are the time averages of the log diagonal QR factors.
 */
inline LyapunovSpectrum lyapunov_spectrum(const HamiltonianSystem& sys, const Vec& x0, double T,
                                          const LyapunovPolicy& lpol = {}, const FlowPolicy& fpol_in = {}) {
    if (T <= 0) throw Error("lyapunov_spectrum: T must be positive");
    FlowPolicy fpol = fpol_in;
    fpol.step = lpol.step;
    if (!sys.is_regular(x0, fpol.singular_tol)) throw SingularStart("lyapunov_spectrum: singular start");

    const int d = sys.dim();
    const int fiber = lpol.full_tangent ? d : d - 2;
    if (fiber <= 0) throw DimensionMismatch("lyapunov_spectrum: trivial transversal bundle (n = 1)");

    // initial orthonormal fiber basis
    Mat B(d, fiber);
    if (lpol.full_tangent) {
        B = Mat::Identity(d, d);
    } else {
        B = transversal_frame(sys, x0, fpol.singular_tol).basis;
    }

    std::vector<double> logsum(static_cast<size_t>(fiber), 0.0);
    Vec x = x0;
    double t = 0.0;
    const int chunks = static_cast<int>(std::ceil(T / lpol.renorm - 1e-12));
    for (int c = 0; c < chunks; ++c) {
        const double span = std::min(lpol.renorm, T - t);
        const auto path = tangent_flow_path(sys, x, span, fpol);
        x = path.x_end;
        t += span;
        if (x.norm() > lpol.escape_radius)
            throw OrbitEscaped("lyapunov_spectrum: trajectory left the working region at t = " + std::to_string(t));
        if (!sys.is_regular(x, fpol.singular_tol))
            throw SingularOnOrbit("lyapunov_spectrum: orbit hit a singular point");

        Mat W = path.M * B;
        if (!lpol.full_tangent) {
            // project back onto the transversal bundle at the new point
            const Vec g = sys.grad(x);
            const Vec gh = g / g.norm();
            Vec fh = apply_J(g);
            fh -= gh.dot(fh) * gh;  // exact orthogonality holds analytically
            fh /= fh.norm();
            W -= fh * (fh.transpose() * W);
            W -= gh * (gh.transpose() * W);
        }
        // thin QR with positive diagonal convention
        Eigen::HouseholderQR<Mat> qr(W);
        Mat Q = Mat(qr.householderQ()) * Mat::Identity(d, fiber);
        Mat R = Q.transpose() * W;
        for (int i = 0; i < fiber; ++i) {
            const double rii = R(i, i);
            if (rii == 0.0) throw SingularOnOrbit("lyapunov_spectrum: cocycle lost rank");
            if (rii < 0) Q.col(i) = -Q.col(i);
            logsum[static_cast<size_t>(i)] += std::log(std::abs(rii));
        }
        B = Q;

        if (lpol.progress) {
            std::vector<double> running(logsum.size());
            for (size_t i = 0; i < logsum.size(); ++i) running[i] = logsum[i] / t;
            std::sort(running.begin(), running.end(), std::greater<>());
            lpol.progress(t, running);
        }
    }

    LyapunovSpectrum out;
    out.T = t;
    out.renorm_interval = lpol.renorm;
    out.exponents.resize(logsum.size());
    for (size_t i = 0; i < logsum.size(); ++i) out.exponents[i] = logsum[i] / t;
    std::sort(out.exponents.begin(), out.exponents.end(), std::greater<>());
    spectrum_diagnostics(out);
    return out;
}

/// Independent largest-exponent estimate from the divergence of two nearby
/// trajectories with periodic renormalization of their separation.
inline double two_trajectory_top_exponent(const HamiltonianSystem& sys, const Vec& x0, double T,
                                          double separation = 1e-8, double renorm = 1.0,
                                          const FlowPolicy& fpol = {}) {
    Vec a = x0;
    Vec b = x0;
    b[0] += separation;
    double logsum = 0.0;
    double t = 0.0;
    while (t < T - 1e-12) {
        const double span = std::min(renorm, T - t);
        a = flow_at(sys, a, span, fpol);
        b = flow_at(sys, b, span, fpol);
        t += span;
        const double dist = (b - a).norm();
        if (dist == 0.0) throw Error("two_trajectory_top_exponent: trajectories collapsed");
        logsum += std::log(dist / separation);
        b = a + (separation / dist) * (b - a);
    }
    return logsum / t;
}

}  // namespace hamshade
