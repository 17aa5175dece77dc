// splitting.hpp — finite-sample tests of the three splitting structures on
// the transversal cocycle: uniform hyperbolicity, ℓ-domination with the
// literal 1/2 threshold, and partial hyperbolicity. Candidate subbundles come
// from finite-time singular vectors. Verdicts quantify over the sampled
// points only, never over a true invariant set.

#pragma once

#include "hamshade/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace hamshade {

enum class Verdict { Holds, Fails, Inconclusive };

inline const char* verdict_str(Verdict v) {
    switch (v) {
        case Verdict::Holds:
            return "holds";
        case Verdict::Fails:
            return "fails";
        case Verdict::Inconclusive:
            return "inconclusive";
    }
    return "inconclusive";
}

/// Blocks ordered by decreasing finite-time growth rate; bases_at[s][b] is an
/// orthonormal fiber_dim x dims[b] basis of block b at sample s.
struct CandidateSplitting {
    std::vector<int> dims;
    std::vector<std::vector<Mat>> bases_at;

    int blocks() const { return static_cast<int>(dims.size()); }

    /// Constant splitting (same bases at every sample).
    static CandidateSplitting constant(const std::vector<Mat>& blocks, int samples) {
        CandidateSplitting out;
        for (const auto& b : blocks) out.dims.push_back(static_cast<int>(b.cols()));
        out.bases_at.assign(static_cast<size_t>(samples), blocks);
        return out;
    }
};

struct SplittingReport {
    Verdict verdict = Verdict::Inconclusive;
    double scale = 0.0;          // ℓ used
    double worst_product = 0.0;  // max of the tested norm expression over samples
    int witness = -1;            // sample index attaining the max
    std::vector<int> block_dims;
    double theta = 0.5;
};

struct SplittingPolicy {
    double theta = 0.5;      // the paper's constant; any value in (0,1) is admissible
    double slack = 1e-6;     // additive slack on the threshold
    double gap_tol = 1e-8;   // minimal rate gap separating blocks
};

namespace detail {

/// Operator norm of the restriction of P to the column span of B.
inline double restricted_norm(const Mat& P, const Mat& B) {
    Eigen::JacobiSVD<Mat> svd(P * B);
    return svd.singularValues()[0];
}

inline int steps_for_scale(const SampledCocycle& c, double ell) {
    const int k = static_cast<int>(std::llround(ell / c.dt()));
    if (k < 1 || std::abs(k * c.dt() - ell) > 1e-9 * std::max(1.0, std::abs(ell)))
        throw Error("splitting: scale must be a positive multiple of the cocycle sampling dt");
    return k;
}

}  // namespace detail

namespace detail {

/// Approximate intersection of two subspaces of the same ambient dimension:
/// the `want` top singular directions of the product of their orthogonal
/// projectors.
inline Mat subspace_intersection(const Mat& A, const Mat& B, int want) {
    const Mat K = A * (A.transpose() * B) * B.transpose();
    Eigen::JacobiSVD<Mat> svd(K, Eigen::ComputeFullU);
    return svd.matrixU().leftCols(want);
}

}  // namespace detail

/**
 * Estimate Oseledets-style blocks from finite-time singular vectors of the
 * cocycle over windows of length `horizon` (a multiple of dt) in both time
 * directions: block b at a sample is the intersection of the backward-window
 * arrival flag (directions that grew at least at block b's rate) with the
 * forward-window slow flag (directions growing at most at that rate). Blocks
 * are split at rate gaps above gap_tol and ordered by decreasing rate; when
 * no gap separates anything, RankCollapse is thrown.
 */
inline CandidateSplitting estimate_splitting(const SampledCocycle& cocycle, double horizon,
                                             const SplittingPolicy& pol = {}) {
    const int h = detail::steps_for_scale(cocycle, horizon);
    if (h >= cocycle.samples()) throw Error("estimate_splitting: horizon exceeds the sampled window");
    const int m = cocycle.fiber_dim();

    CandidateSplitting out;
    for (int s = 0; s < cocycle.samples(); ++s) {
        // windows clipped to the available range near the ends
        const int fwd_base = std::min(s, cocycle.samples() - 1 - h);
        const int bwd_base = std::max(0, std::min(s, cocycle.samples() - 1) - h);
        const Mat Ff = cocycle.forward(fwd_base, h);
        const Mat Fb = cocycle.forward(bwd_base, h);
        Eigen::JacobiSVD<Mat> svd_f(Ff, Eigen::ComputeFullV);
        Eigen::JacobiSVD<Mat> svd_b(Fb, Eigen::ComputeFullU);
        const auto& sing = svd_f.singularValues();

        if (out.dims.empty()) {
            std::vector<int> dims;
            int run = 1;
            for (int i = 0; i + 1 < m; ++i) {
                const double gap = (std::log(sing[i]) - std::log(sing[i + 1])) / (h * cocycle.dt());
                if (gap > pol.gap_tol) {
                    dims.push_back(run);
                    run = 1;
                } else {
                    ++run;
                }
            }
            dims.push_back(run);
            if (dims.size() < 2)
                throw RankCollapse("estimate_splitting: singular values are degenerate, blocks not separable");
            out.dims = dims;
        }

        std::vector<Mat> blocks;
        int at = 0;
        for (size_t b = 0; b < out.dims.size(); ++b) {
            const int d = out.dims[b];
            const Mat arrival = svd_b.matrixU().leftCols(at + d);        // grew at least this fast
            const Mat slow = svd_f.matrixV().rightCols(m - at);          // grows at most this fast
            if (b == 0) blocks.push_back(arrival);
            else if (b + 1 == out.dims.size()) blocks.push_back(svd_f.matrixV().rightCols(d));
            else blocks.push_back(detail::subspace_intersection(arrival, slow, d));
            at += d;
        }
        out.bases_at.push_back(std::move(blocks));
    }
    return out;
}

/**
 * The ℓ-domination product of the paper, evaluated at every sample with a
 * full window: ‖Φ^ℓ|_{N^i}‖ · ‖Φ^{−ℓ}(X^ℓ x)|_{N^j}‖ ≤ θ. "Holds" certifies
 * that block j dominates block i (block j is the faster one).
 */
inline SplittingReport domination_check(const SampledCocycle& cocycle, const CandidateSplitting& split, int i, int j,
                                        double ell, const SplittingPolicy& pol = {}) {
    if (i == j || i < 0 || j < 0 || i >= split.blocks() || j >= split.blocks())
        throw IndexOutOfRange("domination_check: block indices must be distinct and valid");
    const int k = detail::steps_for_scale(cocycle, ell);

    SplittingReport rep;
    rep.scale = ell;
    rep.block_dims = split.dims;
    rep.theta = pol.theta;
    int evaluated = 0;
    for (int s = 0; s + k < cocycle.samples(); ++s) {
        const Mat F = cocycle.forward(s, k);
        const double fwd = detail::restricted_norm(F, split.bases_at[static_cast<size_t>(s)][static_cast<size_t>(i)]);
        const Mat Binv = cocycle.backward_at_image(s, k);
        const double bwd =
            detail::restricted_norm(Binv, split.bases_at[static_cast<size_t>(s + k)][static_cast<size_t>(j)]);
        const double prod = fwd * bwd;
        if (prod > rep.worst_product) {
            rep.worst_product = prod;
            rep.witness = s;
        }
        ++evaluated;
    }
    if (evaluated == 0) throw Error("domination_check: no sample admits the requested scale");
    rep.verdict = rep.worst_product <= pol.theta + pol.slack ? Verdict::Holds : Verdict::Fails;
    return rep;
}

/// Uniform hyperbolicity of a two-block splitting (block 0 = unstable,
/// block 1 = stable, per the decreasing-rate ordering): contraction of the
/// stable block forward and of the unstable block backward, both ≤ θ.
inline SplittingReport hyperbolicity_check(const SampledCocycle& cocycle, const CandidateSplitting& split, double ell,
                                           const SplittingPolicy& pol = {}) {
    if (split.blocks() != 2) throw Error("hyperbolicity_check: exactly two blocks expected (N^u, N^s)");
    const int k = detail::steps_for_scale(cocycle, ell);

    SplittingReport rep;
    rep.scale = ell;
    rep.block_dims = split.dims;
    rep.theta = pol.theta;
    int evaluated = 0;
    for (int s = 0; s + k < cocycle.samples(); ++s) {
        const Mat F = cocycle.forward(s, k);
        const double stable =
            detail::restricted_norm(F, split.bases_at[static_cast<size_t>(s)][1]);
        const Mat Binv = cocycle.backward_at_image(s, k);
        const double unstable =
            detail::restricted_norm(Binv, split.bases_at[static_cast<size_t>(s + k)][0]);
        const double worst = std::max(stable, unstable);
        if (worst > rep.worst_product) {
            rep.worst_product = worst;
            rep.witness = s;
        }
        ++evaluated;
    }
    if (evaluated == 0) throw Error("hyperbolicity_check: no sample admits the requested scale");
    rep.verdict = rep.worst_product <= pol.theta + pol.slack ? Verdict::Holds : Verdict::Fails;
    return rep;
}

namespace detail {

/// Zero-width blocks (trivial center) are allowed; returns nullopt for them.
inline std::optional<double> block_norm_or_skip(const Mat& P, const Mat& B) {
    if (B.cols() == 0) return std::nullopt;
    return restricted_norm(P, B);
}

}  // namespace detail

/**
 * Partial hyperbolicity of a three-block splitting (N^u, N^c, N^s): the
 * unstable block expands, the stable block contracts, and each dominates the
 * center from its side. A trivial center reduces to uniform hyperbolicity
 * (the Anosov special case) and is reported as holds when the remaining
 * bounds pass.
 */
inline SplittingReport partial_hyperbolicity_check(const SampledCocycle& cocycle, const CandidateSplitting& split,
                                                   double ell, const SplittingPolicy& pol = {}) {
    if (split.blocks() != 3) throw Error("partial_hyperbolicity_check: exactly three blocks expected (N^u, N^c, N^s)");
    int nontrivial = 0;
    for (int d : split.dims)
        if (d > 0) ++nontrivial;
    if (nontrivial < 2) throw Error("partial_hyperbolicity_check: at least two non-trivial blocks required");
    const int k = detail::steps_for_scale(cocycle, ell);

    SplittingReport rep;
    rep.scale = ell;
    rep.block_dims = split.dims;
    rep.theta = pol.theta;
    int evaluated = 0;
    for (int s = 0; s + k < cocycle.samples(); ++s) {
        const Mat F = cocycle.forward(s, k);
        const Mat Binv = cocycle.backward_at_image(s, k);
        const auto& src = split.bases_at[static_cast<size_t>(s)];
        const auto& dst = split.bases_at[static_cast<size_t>(s + k)];

        double worst = 0.0;
        // expansion of N^u (backward contraction) and contraction of N^s
        if (auto v = detail::block_norm_or_skip(Binv, dst[0])) worst = std::max(worst, *v);
        if (auto v = detail::block_norm_or_skip(F, src[2])) worst = std::max(worst, *v);
        // N^u dominates N^c and N^c dominates N^s
        if (split.dims[1] > 0) {
            if (split.dims[0] > 0)
                worst = std::max(worst, detail::restricted_norm(F, src[1]) * detail::restricted_norm(Binv, dst[0]));
            if (split.dims[2] > 0)
                worst = std::max(worst, detail::restricted_norm(F, src[2]) * detail::restricted_norm(Binv, dst[1]));
        }
        if (worst > rep.worst_product) {
            rep.worst_product = worst;
            rep.witness = s;
        }
        ++evaluated;
    }
    if (evaluated == 0) throw Error("partial_hyperbolicity_check: no sample admits the requested scale");
    rep.verdict = rep.worst_product <= pol.theta + pol.slack ? Verdict::Holds : Verdict::Fails;
    return rep;
}

/// Smallest grid scale at which the domination check holds, or nullopt.
inline std::optional<double> min_domination_scale(const SampledCocycle& cocycle, const CandidateSplitting& split,
                                                  int i, int j, const std::vector<double>& ell_grid,
                                                  const SplittingPolicy& pol = {}) {
    for (double ell : ell_grid) {
        if (ell <= 0) throw Error("min_domination_scale: grid must be positive");
        if (detail::steps_for_scale(cocycle, ell) + 1 > cocycle.samples()) break;
        if (domination_check(cocycle, split, i, j, ell, pol).verdict == Verdict::Holds) return ell;
    }
    return std::nullopt;
}

/**
 * Refine a dominated two-block splitting (N^u first) into the three-block
 * partially hyperbolic candidate: the weaker block is split by the mirror
 * dimension, taking its slowest dim(N^u) finite-time directions as N^s.
 */
inline CandidateSplitting refine_two_block(const SampledCocycle& cocycle, const CandidateSplitting& split,
                                           double horizon) {
    if (split.blocks() != 2) throw Error("refine_two_block: two blocks expected");
    const int du = split.dims[0];
    const int dw = split.dims[1];
    if (du > dw) throw Error("refine_two_block: expected dim N^u <= dim of the weak block");
    const int h = detail::steps_for_scale(cocycle, horizon);

    CandidateSplitting out;
    out.dims = {du, dw - du, du};
    for (int s = 0; s < cocycle.samples(); ++s) {
        const int base = std::min(s, cocycle.samples() - 1 - h);
        const Mat& Bw = split.bases_at[static_cast<size_t>(s)][1];
        // restriction of the forward window to the weak block, in its own
        // orthonormal coordinates
        const Mat F = cocycle.forward(base, h);
        Eigen::JacobiSVD<Mat> svd(Mat(F * Bw), Eigen::ComputeFullV);
        const Mat V = svd.matrixV();
        std::vector<Mat> blocks(3);
        blocks[0] = split.bases_at[static_cast<size_t>(s)][0];
        blocks[1] = Bw * V.leftCols(dw - du);   // faster part of the weak block
        blocks[2] = Bw * V.rightCols(du);       // slowest directions: N^s
        out.bases_at.push_back(std::move(blocks));
    }
    return out;
}

/// Domination verdicts across a scale grid, aggregated: holds at some scale
/// (with the minimal one), fails everywhere, or inconclusive when the
/// holds-pattern is non-monotone in ℓ on the sampled data.
inline SplittingReport domination_profile(const SampledCocycle& cocycle, const CandidateSplitting& split, int i, int j,
                                          const std::vector<double>& ell_grid, const SplittingPolicy& pol = {}) {
    SplittingReport best;
    best.block_dims = split.dims;
    best.theta = pol.theta;
    bool seen_hold = false, hole_after_hold = false;
    for (double ell : ell_grid) {
        if (detail::steps_for_scale(cocycle, ell) + 1 > cocycle.samples()) break;
        const auto rep = domination_check(cocycle, split, i, j, ell, pol);
        if (rep.verdict == Verdict::Holds) {
            if (!seen_hold) best = rep;
            seen_hold = true;
        } else if (seen_hold) {
            hole_after_hold = true;
        }
        if (!seen_hold) best = rep;  // keep the last failing report for the witness
    }
    if (hole_after_hold) best.verdict = Verdict::Inconclusive;
    else best.verdict = seen_hold ? Verdict::Holds : Verdict::Fails;
    return best;
}

}  // namespace hamshade
