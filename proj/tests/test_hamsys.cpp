// Unit tests for Hamiltonian system definitions, builtin catalogue,
// symmetry defects, and suspension flows.

#include "hamshade/hamsys.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace hamshade;

namespace {

// Independent Horner-form evaluation of the builtin polynomials, grouped by
// the power of the first variable. Kept deliberately separate from the
// PolyTerm machinery.
double horner_eval(const std::vector<PolyTerm>& terms, const Vec& x) {
    int max_pow = 0;
    for (const auto& t : terms) max_pow = std::max(max_pow, t.powers[0]);
    // coefficients of x0^k as functions of the remaining variables
    std::vector<double> coeff(static_cast<size_t>(max_pow) + 1, 0.0);
    for (const auto& t : terms) {
        double rest = t.coeff;
        for (size_t i = 1; i < t.powers.size(); ++i)
            rest *= std::pow(x[static_cast<int>(i)], t.powers[i]);
        coeff[static_cast<size_t>(t.powers[0])] += rest;
    }
    double acc = 0.0;
    for (int k = max_pow; k >= 0; --k) acc = acc * x[0] + coeff[static_cast<size_t>(k)];
    return acc;
}

Vec make_point(std::initializer_list<double> vals) {
    Vec v(static_cast<int>(vals.size()));
    int i = 0;
    for (double c : vals) v[i++] = c;
    return v;
}

}  // namespace

TEST_CASE("pedro energy and field match the closed forms") {
    auto sys = make_pedro();
    CHECK(sys.eval_h(make_point({1.0, 0.0})) == Catch::Approx(1.0));
    const Vec f10 = sys.field(make_point({1.0, 0.0}));
    CHECK(f10[0] == Catch::Approx(0.0).margin(1e-14));
    CHECK(f10[1] == Catch::Approx(-3.0));
    const Vec f00 = sys.field(make_point({0.0, 0.0}));
    CHECK(f00.norm() == Catch::Approx(0.0).margin(1e-15));

    // X_H(x,y) = (-6xy, 3y^2 - 3x^2) on a random sample
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 100; ++k) {
        const double x = u(rng), y = u(rng);
        const Vec f = sys.field(make_point({x, y}));
        CHECK(std::abs(f[0] - (-6 * x * y)) <= 1e-12);
        CHECK(std::abs(f[1] - (3 * y * y - 3 * x * x)) <= 1e-12);
    }
}

TEST_CASE("harmonic oscillator basics") {
    auto sys = make_harmonic();
    CHECK(sys.eval_h(Vec::Zero(4)) == Catch::Approx(0.0).margin(1e-15));
    // per-mode (q,p) = (1,0) evolves with X_H = (p, -q)
    const Vec f = sys.field(make_point({1.0, 0.0, 0.0, 0.0}));
    CHECK(f[0] == Catch::Approx(0.0).margin(1e-15));  // q1_dot = p1 = 0
    CHECK(f[2] == Catch::Approx(-1.0));               // p1_dot = -q1
}

TEST_CASE("Horner oracle agrees with builtin evaluation") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (const char* name : {"pedro", "harmonic", "henon-heiles", "saddle-center"}) {
        auto sys = make_builtin(name);
        REQUIRE(!sys.polynomial_terms().empty());
        for (int k = 0; k < 25; ++k) {
            Vec x(sys.dim());
            for (int i = 0; i < sys.dim(); ++i) x[i] = u(rng);
            CHECK(std::abs(sys.eval_h(x) - horner_eval(sys.polynomial_terms(), x)) <= 1e-12);
        }
    }
}

TEST_CASE("regularity detection") {
    auto pedro = make_pedro();
    CHECK_FALSE(pedro.is_regular(make_point({0.0, 0.0}), 1e-8));
    CHECK(pedro.is_regular(make_point({1.0, 0.0}), 1e-8));
    auto harm = make_harmonic();
    CHECK_FALSE(harm.is_regular(Vec::Zero(4), 1e-8));
    CHECK_THROWS_AS(harm.is_regular(Vec::Zero(4), -1.0), Error);
}

TEST_CASE("gradient vanishes exactly where the field does") {
    auto sys = make_henon_heiles();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 30; ++k) {
        Vec x(4);
        for (int i = 0; i < 4; ++i) x[i] = u(rng);
        CHECK(sys.grad(x).norm() == Catch::Approx(sys.field(x).norm()));
    }
}

TEST_CASE("energy is a first integral at the field level") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (const char* name : {"pedro", "harmonic", "henon-heiles", "saddle-center"}) {
        auto sys = make_builtin(name);
        for (int k = 0; k < 50; ++k) {
            Vec x(sys.dim());
            for (int i = 0; i < sys.dim(); ++i) x[i] = u(rng);
            const Vec g = sys.grad(x);
            const double rel = std::abs(g.dot(sys.field(x))) / std::max(1.0, g.squaredNorm());
            CHECK(rel <= 1e-10);
        }
    }
}

TEST_CASE("pedro 2pi/3 rotation equivariance") {
    auto sys = make_pedro();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<Vec> samples;
    for (int k = 0; k < 100; ++k) samples.push_back(make_point({u(rng), u(rng)}));
    CHECK(symmetry_defect(sys, rot2(2.0 * M_PI / 3.0), samples) <= 1e-12);
    CHECK(symmetry_defect(sys, Mat::Identity(2, 2), samples) == 0.0);
}

TEST_CASE("harmonic oscillator is rotation invariant per mode") {
    auto sys = make_harmonic();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Vec> samples;
    for (int k = 0; k < 50; ++k) samples.push_back(make_point({u(rng), u(rng), u(rng), u(rng)}));
    for (double theta : {0.3, 1.7, -2.4}) {
        // rotation acting on the (q1,p1) pair; coordinates are (q1,q2,p1,p2)
        const Mat R = rotation_in_plane(4, 0, 2, theta);
        CHECK(symmetry_defect(sys, R, samples) <= 1e-12);
    }
}

TEST_CASE("finite-difference gradient fallback") {
    // Transcendental H with hand-coded analytic gradient as reference.
    auto h = [](const Vec& x) { return std::sin(x[0]) * x[3] + std::exp(0.3 * x[1]) + 0.5 * x[2] * x[2]; };
    auto gref = [](const Vec& x) {
        Vec g(4);
        g << std::cos(x[0]) * x[3], 0.3 * std::exp(0.3 * x[1]), x[2], std::sin(x[0]);
        return g;
    };
    HamiltonianSystem sys("custom", 2, h);
    REQUIRE_FALSE(sys.has_analytic_gradient());
    const Vec x = make_point({0.4, -0.2, 0.7, 1.1});
    CHECK((sys.grad(x) - gref(x)).norm() <= 1e-9);

    // Observed convergence order of plain central differences >= 1.9 on a
    // log-log fit (the production step is fixed; this probes the scheme).
    auto central = [&](double step) {
        Vec g(4);
        Vec xp = x;
        for (int i = 0; i < 4; ++i) {
            const double xi = x[i];
            xp[i] = xi + step;
            const double fp = h(xp);
            xp[i] = xi - step;
            const double fm = h(xp);
            xp[i] = xi;
            g[i] = (fp - fm) / (2 * step);
        }
        return g;
    };
    const double e1 = (central(1e-3) - gref(x)).norm();
    const double e2 = (central(5e-4) - gref(x)).norm();
    const double order = std::log(e1 / e2) / std::log(2.0);
    CHECK(order >= 1.9);
}

TEST_CASE("analytic hessian matches the gradient jacobian") {
    auto sys = make_henon_heiles();
    const Vec x = make_point({0.1, -0.2, 0.3, 0.05});
    const Mat H = sys.hess(x);
    const double step = 1e-6;
    Mat Hfd(4, 4);
    for (int j = 0; j < 4; ++j) {
        Vec xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        Hfd.col(j) = (sys.grad(xp) - sys.grad(xm)) / (2 * step);
    }
    CHECK((H - Hfd).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK((H - H.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dimension and construction errors") {
    auto sys = make_harmonic();
    CHECK_THROWS_AS(sys.eval_h(Vec::Zero(2)), DimensionMismatch);
    CHECK_THROWS_AS(sys.field(Vec::Zero(6)), DimensionMismatch);
    // n = 1 without the documented flag is rejected
    CHECK_THROWS_AS(HamiltonianSystem("bad", 1, [](const Vec&) { return 0.0; }), DimensionMismatch);
    Vec bad = Vec::Zero(4);
    bad[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(sys.eval_h(bad), Error);
}

TEST_CASE("suspension flow over the cat map") {
    auto susp = make_cat_suspension();
    Vec x = make_point({0.2, 0.7});

    SECTION("unit ceiling formula") {
        auto [x3, r3] = susp.flow(x, 0.0, 3.25);
        Vec expect = x;
        for (int i = 0; i < 3; ++i) {
            Vec y(2);
            y << std::fmod(2 * expect[0] + expect[1], 1.0), std::fmod(expect[0] + expect[1], 1.0);
            expect = y;
        }
        CHECK((x3 - expect).norm() <= 1e-12);
        CHECK(r3 == Catch::Approx(0.25));
    }

    SECTION("zero time is the identity") {
        auto [x0, r0] = susp.flow(x, 0.4, 0.0);
        CHECK((x0 - x).norm() == 0.0);
        CHECK(r0 == 0.4);
    }

    SECTION("semigroup property on random states") {
        std::mt19937_64 rng(21);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_real_distribution<double> time(-4.0, 4.0);
        for (int k = 0; k < 50; ++k) {
            Vec y = make_point({u(rng), u(rng)});
            const double r = 0.999 * u(rng);
            const double s = time(rng), sp = time(rng);
            auto [x1, r1] = susp.flow(y, r, s);
            auto [x2, r2] = susp.flow(x1, r1, sp);
            auto [xd, rd] = susp.flow(y, r, s + sp);
            CHECK((x2 - xd).norm() <= 1e-12);
            CHECK(std::abs(r2 - rd) <= 1e-12);
        }
    }

    SECTION("negative time requires the inverse") {
        SuspensionSystem no_inv("no-inv", [](const Vec& v) { return v; }, nullptr,
                                [](const Vec&) { return 1.0; }, 1.0);
        CHECK_THROWS_AS(no_inv.flow(Vec::Zero(2), 0.2, -0.5), InverseUnavailable);
    }

    SECTION("non-mixing slab witness at integer times") {
        // With ceiling = 1, integer-time images preserve the roof coordinate,
        // so the lower slab never meets the upper one.
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int k = 0; k < 40; ++k) {
            Vec y = make_point({u(rng), u(rng)});
            const double r = 0.499 * u(rng);  // in (0, 1/2)
            for (int m = 1; m <= 8; ++m) {
                auto [ym, rm] = susp.flow(y, r, static_cast<double>(m));
                (void)ym;
                CHECK(rm < 0.5);
            }
        }
    }
}
