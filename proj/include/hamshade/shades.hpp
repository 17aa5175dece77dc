// shades.hpp — pseudo-orbits and the numerical search procedures for the
// shade properties: shadowing, weak shadowing, expansiveness, and weak
// specification. All searches are deterministic (fixed grids and descent
// schedules); a failed search means "not found within budget", never a proof
// of absence.

#pragma once

#include "hamshade/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace hamshade {

/**
 * A (δ,T)-pseudo-orbit over a finite index window. Entry k corresponds to
 * chain index k − anchor, so windows may extend to negative indices; the
 * chain time origin S(0) = 0 sits at the anchor entry.
 */
struct PseudoOrbit {
    std::vector<Vec> points;
    std::vector<double> times;
    double delta = 0.0;
    double T_min = 0.0;
    std::vector<double> jump_errors;  // d(X^{t_i}(x_i), x_{i+1}) per jump
    int anchor = 0;

    int size() const { return static_cast<int>(points.size()); }
    int i_min() const { return -anchor; }
    int i_max() const { return size() - 1 - anchor; }
    const Vec& point(int chain_index) const { return points[static_cast<size_t>(chain_index + anchor)]; }
    double time(int chain_index) const { return times[static_cast<size_t>(chain_index + anchor)]; }

    /// Accumulated chain times S(i) for i in [i_min, i_max + 1], with S(0) = 0.
    std::vector<double> accumulated() const {
        std::vector<double> S(static_cast<size_t>(size()) + 1, 0.0);
        S[static_cast<size_t>(anchor)] = 0.0;
        for (int k = anchor; k < size(); ++k) S[static_cast<size_t>(k + 1)] = S[static_cast<size_t>(k)] + times[static_cast<size_t>(k)];
        for (int k = anchor - 1; k >= 0; --k) S[static_cast<size_t>(k)] = S[static_cast<size_t>(k + 1)] - times[static_cast<size_t>(k)];
        return S;
    }
};

/// Piecewise-linear increasing reparametrization with α(0) = 0.
struct Reparametrization {
    std::vector<std::pair<double, double>> breakpoints;  // (t, α(t)), t ascending
    double epsilon_class = 0.0;

    static Reparametrization identity(double eps = 0.0) {
        Reparametrization a;
        a.breakpoints = {{0.0, 0.0}};
        a.epsilon_class = eps;
        return a;
    }

    /// Build from knots (ascending, containing 0) and one slope per interval.
    static Reparametrization from_slopes(const std::vector<double>& knots, const std::vector<double>& slopes,
                                         double eps) {
        if (knots.size() != slopes.size() + 1) throw Error("reparametrization: knots/slopes size mismatch");
        size_t zero = knots.size();
        for (size_t i = 0; i < knots.size(); ++i)
            if (knots[i] == 0.0) zero = i;
        if (zero == knots.size()) throw Error("reparametrization: knots must contain 0");
        Reparametrization a;
        a.epsilon_class = eps;
        std::vector<double> vals(knots.size(), 0.0);
        for (size_t i = zero; i + 1 < knots.size(); ++i)
            vals[i + 1] = vals[i] + slopes[i] * (knots[i + 1] - knots[i]);
        for (size_t i = zero; i > 0; --i)
            vals[i - 1] = vals[i] - slopes[i - 1] * (knots[i] - knots[i - 1]);
        a.breakpoints.resize(knots.size());
        for (size_t i = 0; i < knots.size(); ++i) a.breakpoints[i] = {knots[i], vals[i]};
        return a;
    }

    double operator()(double t) const {
        if (breakpoints.empty()) return t;
        size_t i = 0;
        while (i + 1 < breakpoints.size() && breakpoints[i + 1].first <= t) ++i;
        // interpolate/extrapolate with the local slope
        const size_t j = (i + 1 < breakpoints.size() || breakpoints.size() == 1) ? i : i - 1;
        const double t0 = breakpoints[j].first, a0 = breakpoints[j].second;
        double slope = 1.0;
        if (j + 1 < breakpoints.size()) {
            slope = (breakpoints[j + 1].second - a0) / (breakpoints[j + 1].first - t0);
        } else if (j > 0) {
            slope = (a0 - breakpoints[j - 1].second) / (t0 - breakpoints[j - 1].first);
        }
        return a0 + slope * (t - t0);
    }

    /// max over breakpoints of |α(t)/t − 1| (piecewise linearity extends the
    /// bound between them).
    double rep_defect() const {
        double worst = 0.0;
        for (const auto& [t, a] : breakpoints)
            if (t != 0.0) worst = std::max(worst, std::abs(a / t - 1.0));
        return worst;
    }

    bool strictly_increasing() const {
        for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
            if (breakpoints[i + 1].second <= breakpoints[i].second) return false;
        return true;
    }
};

struct ShadowReport {
    bool success = false;
    std::optional<Vec> z;
    std::optional<Reparametrization> alpha;
    double achieved_eps = std::numeric_limits<double>::infinity();
    long budget_spent = 0;
    std::string note;  // "budget exhausted" marks the semi-decidable failure
};

struct SearchPolicy {
    double search_step = 1e-2;     // integration step inside search objectives
    int samples_per_segment = 20;  // sup-distance discretization
    double slope_margin = 0.999;   // slope bound = 1 ± slope_margin·ε (strict Rep(ε))
    double orbit_sample_dt = 0.05; // weak shadowing orbit discretization
    double orbit_span = 0.0;       // weak shadowing orbit half-length; 0 = auto
    double grid_dt = 0.02;         // expansiveness alignment grid
    double orbit_tol = 1e-4;       // distance above which y counts as off-orbit
    std::vector<double> probe_fractions = {0.5, 0.25};  // companion radii as fractions of delta
    Method method = Method::ImplicitMidpoint;
};

// ---------------------------------------------------------------------------
// Pseudo-orbit construction and evaluation
// ---------------------------------------------------------------------------

/// Validate points and jump times into a (δ,T)-pseudo-orbit; jump errors are
/// measured with the given integrator policy and must stay strictly below δ.
inline PseudoOrbit build_pseudo_orbit(const HamiltonianSystem& sys, const std::vector<Vec>& points,
                                      const std::vector<double>& times, double delta, double T_min, int anchor = 0,
                                      const FlowPolicy& fpol = {}) {
    if (points.size() != times.size() || points.empty())
        throw Error("build_pseudo_orbit: points and times must match and be non-empty");
    if (anchor < 0 || anchor >= static_cast<int>(points.size()))
        throw Error("build_pseudo_orbit: anchor outside the window");
    PseudoOrbit po;
    po.points = points;
    po.times = times;
    po.delta = delta;
    po.T_min = T_min;
    po.anchor = anchor;
    for (size_t k = 0; k < times.size(); ++k) {
        if (times[k] < T_min)
            throw TimeTooShort(static_cast<int>(k) - anchor,
                               "pseudo-orbit: t_i below T at chain index " + std::to_string(static_cast<int>(k) - anchor));
    }
    po.jump_errors.resize(points.size() - 1);
    for (size_t k = 0; k + 1 < points.size(); ++k) {
        const Vec reached = flow_at(sys, points[k], times[k], fpol);
        const double err = (reached - points[k + 1]).norm();
        if (!(err < delta))
            throw JumpTooLarge(static_cast<int>(k) - anchor,
                               "pseudo-orbit: jump " + std::to_string(err) + " at chain index " +
                                   std::to_string(static_cast<int>(k) - anchor) + " not below delta");
        po.jump_errors[k] = err;
    }
    return po;
}

/// x_0 ⋆ t: the chained evaluation X^{t − S(i)}(x_i) on the segment with
/// S(i) ≤ t < S(i+1).
inline Vec chain_eval(const HamiltonianSystem& sys, const PseudoOrbit& po, double t, const FlowPolicy& fpol = {}) {
    const auto S = po.accumulated();
    if (t < S.front() || t >= S.back()) throw OutOfWindow("chain_eval: t outside the accumulated window");
    int seg = 0;
    while (seg + 1 < po.size() && S[static_cast<size_t>(seg + 1)] <= t) ++seg;
    return flow_at(sys, po.points[static_cast<size_t>(seg)], t - S[static_cast<size_t>(seg)], fpol);
}

/**
 * The anti-shadowing chain used near a continuum of periodic points: constant
 * at q for i ≤ 0, a straight-line drift to y in k jumps of size d(q,y)/k,
 * then constant at y, all with jump time equal to the period.
 */
inline PseudoOrbit breakdown_pseudo_orbit(const HamiltonianSystem& sys, const Vec& q, const Vec& y, double delta,
                                          int k, double period, int pad = 2, const FlowPolicy& fpol = {}) {
    if (k < 1) throw Error("breakdown_pseudo_orbit: k must be positive");
    const double dist = (y - q).norm();
    if (dist >= k * delta)
        throw InsufficientSteps("breakdown_pseudo_orbit: k jumps of size < delta cannot cover d(q,y)");
    std::vector<Vec> points;
    std::vector<double> times;
    for (int i = 0; i < pad; ++i) points.push_back(q);
    points.push_back(q);  // chain index 0
    for (int i = 1; i <= k; ++i) points.push_back(q + (static_cast<double>(i) / k) * (y - q));
    for (int i = 0; i < pad; ++i) points.push_back(y);
    times.assign(points.size(), period);
    return build_pseudo_orbit(sys, points, times, delta, period * (1.0 - 1e-3), pad, fpol);
}

// ---------------------------------------------------------------------------
// Search helpers
// ---------------------------------------------------------------------------

namespace detail {

/// Flow samples at exact ascending offsets from x0 (offsets[0] may be 0).
inline std::vector<Vec> sample_flow(const HamiltonianSystem& sys, const Vec& x0, const std::vector<double>& offsets,
                                    const FlowPolicy& pol) {
    std::vector<Vec> out;
    out.reserve(offsets.size());
    Vec x = x0;
    double at = 0.0;
    for (double t : offsets) {
        if (t < at) throw Error("sample_flow: offsets must ascend");
        if (t > at) x = flow_at(sys, x, t - at, pol);
        at = t;
        out.push_back(x);
    }
    return out;
}

/// Chain discretization shared by the shadowing searches.
struct ChainGrid {
    std::vector<double> t;        // global chain times, ascending
    std::vector<Vec> x;           // x_0 ⋆ t
    std::vector<int> segment;     // owning segment (array position)
    std::vector<double> knots;    // S(i) for the window, ascending (size segments+1)
};

inline ChainGrid chain_grid(const HamiltonianSystem& sys, const PseudoOrbit& po, int per_segment,
                            const FlowPolicy& pol) {
    ChainGrid grid;
    const auto S = po.accumulated();
    grid.knots.assign(S.begin(), S.end());
    for (int seg = 0; seg < po.size(); ++seg) {
        std::vector<double> offsets;
        const double span = po.times[static_cast<size_t>(seg)];
        for (int k = 0; k < per_segment; ++k) offsets.push_back(span * k / per_segment);
        const auto pts = sample_flow(sys, po.points[static_cast<size_t>(seg)], offsets, pol);
        for (int k = 0; k < per_segment; ++k) {
            grid.t.push_back(S[static_cast<size_t>(seg)] + offsets[static_cast<size_t>(k)]);
            grid.x.push_back(pts[static_cast<size_t>(k)]);
            grid.segment.push_back(seg);
        }
    }
    return grid;
}

/// Evaluate sup-distance between the reparametrized orbit of z and the chain
/// grid; early-exits once the running max exceeds `bail` (if positive).
inline double shadow_objective(const HamiltonianSystem& sys, const ChainGrid& grid, const Vec& z,
                               const Reparametrization& alpha, const FlowPolicy& pol, double bail = 0.0) {
    // alpha times are monotone along the grid; split at zero and integrate
    // sequentially in each direction
    double worst = 0.0;
    const size_t n = grid.t.size();
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    // grid.t ascending already; find first nonnegative alpha-time
    size_t first_pos = 0;
    while (first_pos < n && alpha(grid.t[first_pos]) < 0.0) ++first_pos;

    Vec x = z;
    double at = 0.0;
    for (size_t i = first_pos; i < n; ++i) {
        const double target = alpha(grid.t[i]);
        if (target > at) x = flow_at(sys, x, target - at, pol);
        at = target;
        worst = std::max(worst, (x - grid.x[i]).norm());
        if (bail > 0 && worst > bail) return worst;
    }
    x = z;
    at = 0.0;
    for (size_t ii = first_pos; ii-- > 0;) {
        const double target = alpha(grid.t[ii]);
        if (target < at) x = flow_at(sys, x, target - at, pol);
        at = target;
        worst = std::max(worst, (x - grid.x[ii]).norm());
        if (bail > 0 && worst > bail) return worst;
    }
    return worst;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Shadowing search
// ---------------------------------------------------------------------------

/**
 * Search for an ε-shadowing orbit of the chain: minimize over z in a ball
 * around x_0 and piecewise-linear α ∈ Rep(ε) (one knot per chain segment)
 * the sup-distance sup_t d(X^{α(t)}(z), x_0 ⋆ t) over the sample grid.
 * Deterministic coarse grid + pattern/coordinate descent; success iff the
 * objective drops strictly below ε within the evaluation budget.
 */
inline ShadowReport shadow_search(const HamiltonianSystem& sys, const PseudoOrbit& po, double eps, long budget,
                                  const SearchPolicy& spol = {}) {
    if (eps <= 0) throw Error("shadow_search: eps must be positive");
    FlowPolicy pol;
    pol.step = spol.search_step;
    pol.method = spol.method;
    const auto grid = detail::chain_grid(sys, po, spol.samples_per_segment, pol);

    const int d = sys.dim();
    const int segs = po.size();
    const double slope_cap = spol.slope_margin * eps;

    ShadowReport rep;
    long spent = 0;
    std::vector<double> slopes(static_cast<size_t>(segs), 1.0);
    auto alpha_of = [&](const std::vector<double>& s) {
        return Reparametrization::from_slopes(grid.knots, s, eps);
    };
    Vec best_z = po.point(0);
    std::vector<double> best_slopes = slopes;
    double best = std::numeric_limits<double>::infinity();

    // sufficient-decrease forcing keeps the descent from chasing roundoff
    double forcing = 0.0;
    auto try_candidate = [&](const Vec& z, const std::vector<double>& s) {
        if (spent >= budget) return false;
        ++spent;
        double v;
        try {
            v = detail::shadow_objective(sys, grid, z, alpha_of(s), pol, best);
        } catch (const Error&) {
            return false;  // candidate trajectory hit a singularity or escaped
        }
        if (v < best - forcing) {
            best = v;
            best_z = z;
            best_slopes = s;
            return true;
        }
        return false;
    };

    // stage 1: coarse grid over the z-ball with the identity reparametrization
    try_candidate(po.point(0), slopes);
    for (int axis = 0; axis < d && spent < budget; ++axis) {
        for (double r : {0.5 * eps, -0.5 * eps}) {
            Vec z = po.point(0);
            z[axis] += r;
            try_candidate(z, slopes);
        }
    }

    // stage 2: alternating pattern descent on z and coordinate descent on slopes
    double radius = 0.5 * eps;
    double srad = 0.25 * slope_cap;
    while (spent < budget && best >= eps && radius > 1e-12) {
        forcing = std::max(1e-4 * radius * radius, 1e-9 * best);
        bool improved = false;
        for (int axis = 0; axis < d && spent < budget; ++axis) {
            for (double sign : {1.0, -1.0}) {
                Vec z = best_z;
                z[axis] += sign * radius;
                improved |= try_candidate(z, best_slopes);
            }
        }
        for (int seg = 0; seg < segs && spent < budget; ++seg) {
            for (double sign : {1.0, -1.0}) {
                auto s = best_slopes;
                s[static_cast<size_t>(seg)] =
                    std::clamp(s[static_cast<size_t>(seg)] + sign * srad, 1.0 - slope_cap, 1.0 + slope_cap);
                improved |= try_candidate(best_z, s);
            }
        }
        if (!improved) {
            radius *= 0.5;
            srad *= 0.5;
        }
    }

    rep.budget_spent = spent;
    rep.achieved_eps = best;
    if (best < eps) {
        rep.success = true;
        rep.z = best_z;
        rep.alpha = alpha_of(best_slopes);
    } else {
        rep.note = spent >= budget ? "budget exhausted: not found (semi-decidable, not a proof of absence)"
                                   : "search converged without reaching eps";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Weak shadowing search
// ---------------------------------------------------------------------------

/**
 * Weak shadowing ignores time: success iff every chain point lies within ε
 * of the sampled orbit of some z (as a point set). Seeds at every chain
 * point, then pattern descent.
 */
inline ShadowReport weak_shadow_search(const HamiltonianSystem& sys, const PseudoOrbit& po, double eps, long budget,
                                       const SearchPolicy& spol = {}) {
    if (eps <= 0) throw Error("weak_shadow_search: eps must be positive");
    FlowPolicy pol;
    pol.step = spol.search_step;
    pol.method = spol.method;

    double span = spol.orbit_span;
    if (span <= 0) {
        span = 0.0;
        for (double t : po.times) span += t;
    }
    const int half = static_cast<int>(std::ceil(span / spol.orbit_sample_dt));

    auto objective = [&](const Vec& z) {
        // sample the orbit of z over [-span, span]
        std::vector<double> offsets;
        for (int k = 0; k <= half; ++k) offsets.push_back(k * spol.orbit_sample_dt);
        const auto fwd = detail::sample_flow(sys, z, offsets, pol);
        FlowPolicy bpol = pol;
        std::vector<Vec> orbit = fwd;
        Vec x = z;
        for (int k = 1; k <= half; ++k) {
            x = flow_at(sys, x, -spol.orbit_sample_dt, bpol);
            orbit.push_back(x);
        }
        double worst = 0.0;
        for (const auto& p : po.points) {
            double dmin = std::numeric_limits<double>::infinity();
            for (const auto& o : orbit) dmin = std::min(dmin, (p - o).norm());
            worst = std::max(worst, dmin);
        }
        return worst;
    };

    ShadowReport rep;
    long spent = 0;
    Vec best_z = po.point(0);
    double best = std::numeric_limits<double>::infinity();
    double forcing = 0.0;
    auto try_candidate = [&](const Vec& z) {
        if (spent >= budget) return false;
        ++spent;
        double v;
        try {
            v = objective(z);
        } catch (const Error&) {
            return false;
        }
        if (v < best - forcing) {
            best = v;
            best_z = z;
            return true;
        }
        return false;
    };

    for (const auto& p : po.points) {
        try_candidate(p);
        if (spent >= budget || best < eps) break;
    }
    double radius = 0.5 * eps;
    while (spent < budget && best >= eps && radius > 1e-10) {
        forcing = std::max(1e-4 * radius * radius, 1e-9 * best);
        bool improved = false;
        for (int axis = 0; axis < sys.dim() && spent < budget; ++axis) {
            for (double sign : {1.0, -1.0}) {
                Vec z = best_z;
                z[axis] += sign * radius;
                improved |= try_candidate(z);
            }
        }
        if (!improved) radius *= 0.5;
    }

    rep.budget_spent = spent;
    rep.achieved_eps = best;
    if (best < eps) {
        rep.success = true;
        rep.z = best_z;
    } else {
        rep.note = spent >= budget ? "budget exhausted: not found (semi-decidable, not a proof of absence)"
                                   : "search converged without reaching eps";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Expansiveness probe
// ---------------------------------------------------------------------------

enum class ExpansiveVerdict { Separated, NonExpansiveWitness, Inconclusive };

struct ExpansiveReport {
    ExpansiveVerdict verdict = ExpansiveVerdict::Inconclusive;
    std::optional<Vec> witness;   // off-orbit companion that never separates
    double exit_time = 0.0;       // separation time for the Separated verdict
    long budget_spent = 0;
};

/**
 * Sample companions y in the δ-ball around x (within the energy level, along
 * the transversal directions), and align the two trajectories over
 * [-T_window, T_window] with a monotone discrete time correspondence. A
 * companion that stays δ-close under some alignment yet sits farther than
 * orbit_tol from the ε-orbit segment of x witnesses non-expansiveness; if
 * every companion separates, the probe reports the largest alignment exit
 * time. Budget counts trajectory grid evaluations; running out before any
 * verdict is Inconclusive.
 */
inline ExpansiveReport expansiveness_probe(const HamiltonianSystem& sys, const Vec& x, double delta, double T_window,
                                           double eps, long budget, const SearchPolicy& spol = {}) {
    FlowPolicy pol;
    pol.step = spol.search_step;
    pol.method = spol.method;
    const int K = static_cast<int>(std::ceil(T_window / spol.grid_dt));

    ExpansiveReport rep;
    long spent = 0;

    // trajectory of x over the window
    auto trajectory = [&](const Vec& z) {
        std::vector<Vec> traj(static_cast<size_t>(2 * K + 1), Vec());
        std::vector<double> offsets;
        for (int k = 0; k <= K; ++k) offsets.push_back(k * spol.grid_dt);
        const auto fwd = detail::sample_flow(sys, z, offsets, pol);
        for (int k = 0; k <= K; ++k) traj[static_cast<size_t>(K + k)] = fwd[static_cast<size_t>(k)];
        Vec w = z;
        for (int k = 1; k <= K; ++k) {
            w = flow_at(sys, w, -spol.grid_dt, pol);
            traj[static_cast<size_t>(K - k)] = w;
        }
        spent += 2 * K + 1;
        return traj;
    };
    if (spent + (2 * K + 1) > budget) {
        rep.budget_spent = spent;
        return rep;  // cannot even tabulate x: inconclusive
    }
    const auto xt = trajectory(x);

    // companions in the δ-ball off the flow direction (the δ-ball is not
    // restricted to the energy level: neighboring levels are legitimate
    // companions, e.g. concentric circles)
    std::vector<Vec> companions;
    {
        Mat basis;
        if (sys.dim() >= 4) {
            Mat frame = transversal_frame(sys, x).basis;
            basis.resize(sys.dim(), frame.cols() + 1);
            basis.leftCols(frame.cols()) = frame;
            basis.col(frame.cols()) = sys.grad(x).normalized();
        } else {
            // n = 1: probe along the flow-orthogonal direction
            Vec f = sys.field(x);
            Vec u(2);
            u << -f[1], f[0];
            basis = u.normalized();
        }
        for (int c = 0; c < basis.cols(); ++c) {
            for (double frac : spol.probe_fractions) {
                for (double sign : {1.0, -1.0}) {
                    companions.push_back(x + sign * frac * delta * basis.col(c));
                }
            }
        }
    }

    // monotone alignment reachability (discrete Fréchet style) in one time
    // direction; returns the furthest x-row reached
    auto align_forward = [&](const std::vector<Vec>& yt, int dir) {
        auto at = [&](const std::vector<Vec>& tr, int idx) { return tr[static_cast<size_t>(K + dir * idx)]; };
        std::vector<char> reach(static_cast<size_t>(K + 1), 0);  // y-indices reachable at current x-row
        if ((at(xt, 0) - at(yt, 0)).norm() > delta) return 0;
        reach[0] = 1;
        int furthest = 0;
        for (int i = 1; i <= K; ++i) {
            std::vector<char> next(static_cast<size_t>(K + 1), 0);
            bool any = false;
            // prefix reachability: j reachable at row i if some j' <= j was
            // reachable at row i-1 or at row i (moves right/up/diagonal)
            char carry = 0;
            for (int j = 0; j <= K; ++j) {
                carry |= reach[static_cast<size_t>(j)];
                if (carry && (at(xt, i) - at(yt, j)).norm() <= delta) {
                    next[static_cast<size_t>(j)] = 1;
                    any = true;
                }
            }
            // allow waiting on the same x-row is implicit via prefix carry
            if (!any) return i - 1;
            reach.swap(next);
            furthest = i;
        }
        return furthest;
    };

    double worst_exit = 0.0;
    bool all_separated = true;
    bool any_companion_done = false;
    for (const auto& y : companions) {
        if (spent + (2 * K + 1) > budget) {
            all_separated = false;  // undecided companions remain
            break;
        }
        std::vector<Vec> yt;
        try {
            yt = trajectory(y);
        } catch (const Error&) {
            all_separated = false;  // companion trajectory not computable
            continue;
        }
        any_companion_done = true;
        const int fwd = align_forward(yt, +1);
        const int bwd = align_forward(yt, -1);
        const bool survives = fwd == K && bwd == K;
        if (survives) {
            // is y on the eps-orbit segment of x?
            double dmin = std::numeric_limits<double>::infinity();
            const int eps_steps = std::max(1, static_cast<int>(std::ceil(eps / spol.grid_dt)));
            for (int k = -eps_steps; k <= eps_steps; ++k) {
                const int idx = std::clamp(k, -K, K);
                dmin = std::min(dmin, (y - xt[static_cast<size_t>(K + idx)]).norm());
            }
            if (dmin > spol.orbit_tol) {
                rep.verdict = ExpansiveVerdict::NonExpansiveWitness;
                rep.witness = y;
                rep.budget_spent = spent;
                return rep;
            }
            all_separated = false;  // survives but cannot be certified off-orbit
        } else {
            // the companion separates in every direction that blocks; report
            // how long it survived there
            double exit = 0.0;
            if (fwd < K) exit = std::max(exit, fwd * spol.grid_dt);
            if (bwd < K) exit = std::max(exit, bwd * spol.grid_dt);
            worst_exit = std::max(worst_exit, exit);
        }
    }

    rep.budget_spent = spent;
    if (all_separated && any_companion_done) {
        rep.verdict = ExpansiveVerdict::Separated;
        rep.exit_time = worst_exit;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Weak specification
// ---------------------------------------------------------------------------

struct OrbitArc {
    Vec point;        // P(t) = X^{t - t_begin}(point) on [t_begin, t_end]
    double t_begin = 0.0;
    double t_end = 0.0;
};

/**
 * Search for one orbit ε-shadowing two orbit arcs separated by at least K:
 * grid + pattern descent over initial conditions near the first arc's start.
 */
inline ShadowReport weak_spec_check(const HamiltonianSystem& sys, const OrbitArc& arc1, const OrbitArc& arc2,
                                    double K, double eps, long budget, const SearchPolicy& spol = {}) {
    if (arc1.t_end <= arc1.t_begin || arc2.t_end <= arc2.t_begin)
        throw Error("weak_spec_check: arcs must have positive length");
    if (arc2.t_begin < arc1.t_end + K)
        throw Error("weak_spec_check: arcs must be K-spaced (a2 >= b1 + K)");
    FlowPolicy pol;
    pol.step = spol.search_step;
    pol.method = spol.method;

    // discretize both arcs
    std::vector<double> times;
    std::vector<Vec> targets;
    auto add_arc = [&](const OrbitArc& arc) {
        const int n = spol.samples_per_segment;
        std::vector<double> offs;
        for (int k = 0; k <= n; ++k) offs.push_back((arc.t_end - arc.t_begin) * k / n);
        const auto pts = detail::sample_flow(sys, arc.point, offs, pol);
        for (int k = 0; k <= n; ++k) {
            times.push_back(arc.t_begin + offs[static_cast<size_t>(k)]);
            targets.push_back(pts[static_cast<size_t>(k)]);
        }
    };
    add_arc(arc1);
    add_arc(arc2);

    auto objective = [&](const Vec& x0, double bail) {
        // times ascend; x0 is anchored at t = 0
        double worst = 0.0;
        Vec x = x0;
        double at = 0.0;
        // walk backward first if the window starts below zero
        size_t first_pos = 0;
        while (first_pos < times.size() && times[first_pos] < 0.0) ++first_pos;
        for (size_t i = first_pos; i < times.size(); ++i) {
            if (times[i] > at) x = flow_at(sys, x, times[i] - at, pol);
            at = times[i];
            worst = std::max(worst, (x - targets[i]).norm());
            if (bail > 0 && worst > bail) return worst;
        }
        x = x0;
        at = 0.0;
        for (size_t ii = first_pos; ii-- > 0;) {
            if (times[ii] < at) x = flow_at(sys, x, times[ii] - at, pol);
            at = times[ii];
            worst = std::max(worst, (x - targets[ii]).norm());
            if (bail > 0 && worst > bail) return worst;
        }
        return worst;
    };

    // seed: the first arc's orbit evaluated back at t = 0
    ShadowReport rep;
    long spent = 0;
    Vec best_z = flow_at(sys, arc1.point, -arc1.t_begin, pol);
    double best = std::numeric_limits<double>::infinity();
    double forcing = 0.0;
    auto try_candidate = [&](const Vec& z) {
        if (spent >= budget) return false;
        ++spent;
        double v;
        try {
            v = objective(z, best);
        } catch (const Error&) {
            return false;
        }
        if (v < best - forcing) {
            best = v;
            best_z = z;
            return true;
        }
        return false;
    };
    try_candidate(best_z);

    double radius = 0.5 * eps;
    while (spent < budget && best >= eps && radius > 1e-14) {
        forcing = std::max(1e-4 * radius * radius, 1e-9 * best);
        bool improved = false;
        for (int axis = 0; axis < sys.dim() && spent < budget; ++axis) {
            for (double sign : {1.0, -1.0}) {
                Vec z = best_z;
                z[axis] += sign * radius;
                improved |= try_candidate(z);
            }
        }
        if (!improved) radius *= 0.5;
    }

    rep.budget_spent = spent;
    rep.achieved_eps = best;
    if (best < eps) {
        rep.success = true;
        rep.z = best_z;
    } else {
        rep.note = spent >= budget ? "budget exhausted: not found (semi-decidable, not a proof of absence)"
                                   : "search converged without reaching eps";
    }
    return rep;
}

}  // namespace hamshade
