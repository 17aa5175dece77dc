// cocycle.hpp — finite-sample transversal cocycles: the common interface the
// splitting checks operate on. Two sources: constant linear models (one-step
// matrix repeated) and Hamiltonian orbits (transversal linear Poincaré flow
// chained over transported frames between equally spaced samples).

#pragma once

#include "hamshade/poincare.hpp"

#include <utility>
#include <vector>

namespace hamshade {

class SampledCocycle {
public:
    /// Constant (x-independent) cocycle: the same one-step fiber matrix at
    /// every sample.
    static SampledCocycle constant(const Mat& one_step, double dt, int samples) {
        if (one_step.rows() != one_step.cols()) throw DimensionMismatch("cocycle: one_step must be square");
        if (samples < 2) throw Error("cocycle: need at least two samples");
        SampledCocycle out;
        out.dt_ = dt;
        out.steps_.assign(static_cast<size_t>(samples - 1), one_step);
        return out;
    }

    /// Cocycle of the transversal linear Poincaré flow sampled along an
    /// orbit, with frames transported between consecutive samples.
    static SampledCocycle from_orbit(const HamiltonianSystem& sys, const Vec& x0, double dt, int samples,
                                     const FlowPolicy& fpol = {}) {
        if (samples < 2) throw Error("cocycle: need at least two samples");
        SampledCocycle out;
        out.dt_ = dt;
        out.steps_.reserve(static_cast<size_t>(samples - 1));
        TransversalFrame frame = transversal_frame(sys, x0, fpol.singular_tol);
        for (int i = 0; i + 1 < samples; ++i) {
            const auto leg = linear_poincare_from(sys, frame, dt, fpol);
            out.steps_.push_back(leg.P);
            frame = leg.frame_dst;
        }
        return out;
    }

    int fiber_dim() const { return static_cast<int>(steps_.front().rows()); }
    int samples() const { return static_cast<int>(steps_.size()) + 1; }
    double dt() const { return dt_; }

    /// Φ over k steps starting at sample i (frame coordinates).
    Mat forward(int i, int k) const {
        if (i < 0 || k < 1 || i + k > static_cast<int>(steps_.size()))
            throw IndexOutOfRange("cocycle: window out of range");
        Mat acc = steps_[static_cast<size_t>(i)];
        for (int s = 1; s < k; ++s) acc = steps_[static_cast<size_t>(i + s)] * acc;
        return acc;
    }

    /// Φ^{-k·dt} evaluated at the image sample i+k (the inverse cocycle).
    Mat backward_at_image(int i, int k) const {
        const Mat F = forward(i, k);
        return F.partialPivLu().solve(Mat::Identity(F.rows(), F.cols()));
    }

private:
    double dt_ = 0.0;
    std::vector<Mat> steps_;
};

/// One-step matrix for a constant-rate diagonal model: diag(e^{r_i dt}).
inline Mat diag_rate_step(const std::vector<double>& rates, double dt) {
    Mat step = Mat::Zero(static_cast<int>(rates.size()), static_cast<int>(rates.size()));
    for (size_t i = 0; i < rates.size(); ++i) step(static_cast<int>(i), static_cast<int>(i)) = std::exp(rates[i] * dt);
    return step;
}

/// Block-diagonal one-step matrix from 2x2 (or any square) factors.
inline Mat block_diag_step(const std::vector<Mat>& blocks) {
    int total = 0;
    for (const auto& b : blocks) total += static_cast<int>(b.rows());
    Mat out = Mat::Zero(total, total);
    int at = 0;
    for (const auto& b : blocks) {
        out.block(at, at, b.rows(), b.cols()) = b;
        at += static_cast<int>(b.rows());
    }
    return out;
}

}  // namespace hamshade
