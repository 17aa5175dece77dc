// Periodic orbit Newton search, symplectic eigenvalue quadruples,
// classification, spectral nudge, and rational rotation approximation.

#include "hamshade/orbits.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace hamshade;
using testutil::vec;

TEST_CASE("harmonic oscillator: every regular seed lies on a 2pi orbit") {
    auto sys = make_harmonic();
    const Vec seed = vec({0.8, 0.3, 0.0, -0.2});
    const auto sec = AffineSection::through(sys, seed);
    const auto orbit = find_periodic(sys, seed, sec);
    CHECK(orbit.period == Catch::Approx(2 * M_PI).margin(1e-6));
    CHECK(orbit.residual <= 1e-10);
    // continuum of periodic orbits: monodromy is the identity, degenerate
    CHECK((orbit.monodromy - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-5);
    CHECK(orbit.classification.kind == OrbitClass::Degenerate);
}

TEST_CASE("saddle-center elliptic circle orbit") {
    auto sys = make_saddle_center();
    // exact orbit: q1 = p1 = 0, unit circle in (q2, p2), period 2pi
    const Vec seed = vec({0.0, 1.0, 0.0, 0.0});
    const auto sec = AffineSection::through(sys, seed);
    const auto orbit = find_periodic(sys, seed, sec);
    CHECK(orbit.period == Catch::Approx(2 * M_PI).margin(1e-8));
    CHECK(orbit.residual <= 1e-9);
    // transversal monodromy is the hyperbolic factor diag(e^{2pi}, e^{-2pi})
    const auto quad = eigen_quadruples(orbit.monodromy, 1e-6);
    REQUIRE(quad.groups.size() == 1);
    double big = 0;
    for (const auto& s : quad.groups[0]) big = std::max(big, std::abs(s));
    CHECK(big == Catch::Approx(std::exp(2 * M_PI)).epsilon(1e-4));
    CHECK(orbit.classification.kind == OrbitClass::Hyperbolic);

    // converges from a perturbed seed as well
    const auto orbit2 = find_periodic(sys, vec({3e-3, 1.001, -2e-3, 1e-3}), sec);
    CHECK(orbit2.period == Catch::Approx(2 * M_PI).margin(1e-6));
    CHECK(orbit2.residual <= 1e-9);
    CHECK(std::abs(orbit2.p[0]) <= 1e-8);
    CHECK(std::abs(orbit2.p[2]) <= 1e-8);
}

TEST_CASE("Henon-Heiles line orbit at energy 1/12") {
    auto sys = make_henon_heiles();
    // straight-line normal mode along (sin pi/3, cos pi/3), crossing q1 = 0
    const double pnorm = std::sqrt(1.0 / 6.0);
    const Vec seed = vec({0.0, 0.0, pnorm * std::sqrt(3.0) / 2.0, pnorm * 0.5});
    REQUIRE(sys.eval_h(seed) == Catch::Approx(1.0 / 12.0).epsilon(1e-12));
    AffineSection sec;
    sec.normal = Vec::Unit(4, 0);
    sec.offset = 0.0;
    sec.direction = +1;

    NewtonPolicy npol;
    npol.tol = 1e-9;
    const auto orbit = find_periodic(sys, seed, sec, npol);
    CHECK(orbit.residual <= 1e-8);

    FlowPolicy fine;
    fine.step = 0.5e-3;
    const auto orbit_fine = find_periodic(sys, seed, sec, npol, fine);
    CHECK(std::abs(orbit.period - orbit_fine.period) <= 1e-5);
}

TEST_CASE("Newton failure modes") {
    auto sys = make_harmonic();
    const Vec seed = vec({1.0, 0.0, 0.0, 0.5});
    const auto sec = AffineSection::through(sys, seed);
    NewtonPolicy strict;
    strict.tol = 1e-16;
    strict.max_newton = 0;
    CHECK_THROWS_AS(find_periodic(sys, seed, sec, strict), NoConvergence);
    CHECK_THROWS_AS(find_periodic(sys, Vec::Zero(4), sec), SingularStart);

    // oscillator + free particle: orbits with p2 = 0 are periodic with a
    // parabolic (shear) transversal block, so I - DP is singular
    auto parabolic = HamiltonianSystem::from_polynomial(
        "osc-free", 2, {PolyTerm{0.5, {2, 0, 0, 0}}, PolyTerm{0.5, {0, 0, 2, 0}}, PolyTerm{0.5, {0, 0, 0, 2}}});
    const Vec pseed = vec({1.0, 0.3, 0.0, 1e-4});
    const auto psec = AffineSection::through(parabolic, vec({1.0, 0.3, 0.0, 0.0}));
    CHECK_THROWS_AS(find_periodic(parabolic, pseed, psec), SingularJacobian);
}

TEST_CASE("eigen quadruples on closed forms") {
    SECTION("real reciprocal pair") {
        Mat A = Mat::Zero(2, 2);
        A(0, 0) = 2.0;
        A(1, 1) = 0.5;
        const auto quad = eigen_quadruples(A);
        REQUIRE(quad.groups.size() == 1);
        CHECK(quad.groups[0].size() == 2);
        CHECK(quad.pairing_defect <= 1e-12);
    }
    SECTION("unit-circle conjugate pair") {
        const auto quad = eigen_quadruples(rot2(1.0));
        REQUIRE(quad.groups.size() == 1);
        CHECK(quad.groups[0].size() == 2);
        CHECK(quad.pairing_defect <= 1e-12);
    }
    SECTION("block-diagonal splits into two groups") {
        Mat A = Mat::Zero(4, 4);
        A.topLeftCorner(2, 2) = rot2(1.0);
        A(2, 2) = 3.0;
        A(3, 3) = 1.0 / 3.0;
        const auto quad = eigen_quadruples(A);
        REQUIRE(quad.groups.size() == 2);
        // brute-force oracle: the full spectrum is {e^i, e^-i, 3, 1/3}
        int unit_pairs = 0, real_pairs = 0;
        for (const auto& g : quad.groups) {
            REQUIRE(g.size() == 2);
            if (std::abs(std::abs(g[0]) - 1.0) < 1e-9) ++unit_pairs;
            else ++real_pairs;
        }
        CHECK(unit_pairs == 1);
        CHECK(real_pairs == 1);
        CHECK(quad.pairing_defect <= 1e-12);
    }
}

TEST_CASE("quadruples of random symplectic matrices") {
    std::mt19937_64 rng(41);
    for (int dim : {2, 4, 6}) {
        for (int k = 0; k < 25; ++k) {
            const Mat M = testutil::random_symplectic(dim, rng);
            const auto quad = eigen_quadruples(M);
            size_t total = 0;
            for (const auto& g : quad.groups) total += g.size();
            CHECK(total == static_cast<size_t>(dim));
            CHECK(quad.pairing_defect <= 1e-6);
        }
    }
}

TEST_CASE("classification closed forms") {
    CHECK(classify_monodromy(rot2(1.0)).kind == OrbitClass::Elliptic);
    CHECK(classify_monodromy(rot2(1.0)).k == 1);

    Mat hyp = Mat::Zero(2, 2);
    hyp(0, 0) = 2.0;
    hyp(1, 1) = 0.5;
    CHECK(classify_monodromy(hyp).kind == OrbitClass::Hyperbolic);

    Mat mixed = Mat::Zero(4, 4);
    mixed.topLeftCorner(2, 2) = rot2(1.0);
    mixed(2, 2) = 3.0;
    mixed(3, 3) = 1.0 / 3.0;
    const auto cls = classify_monodromy(mixed);
    CHECK(cls.kind == OrbitClass::Elliptic);
    CHECK(cls.k == 1);

    // real unit eigenvalues and repeated unit pairs are degenerate
    CHECK(classify_monodromy(Mat::Identity(2, 2)).kind == OrbitClass::Degenerate);
    CHECK(classify_monodromy(rot2(M_PI)).kind == OrbitClass::Degenerate);
    Mat shear(2, 2);
    shear << 1, 1, 0, 1;
    CHECK(classify_monodromy(shear).kind == OrbitClass::Degenerate);
}

TEST_CASE("rotations are 1-elliptic away from 0 and pi") {
    const double tau = 1e-6;
    for (double theta : {0.01, 0.5, 1.0, 2.0, 3.0, M_PI - 0.01, -1.3}) {
        const auto cls = classify_monodromy(rot2(theta), tau);
        CHECK(cls.kind == OrbitClass::Elliptic);
        CHECK(cls.k == 1);
    }
}

TEST_CASE("unit eigenvalues of symplectic test matrices have even multiplicity") {
    // shear blocks carry double eigenvalues +1 / -1
    Mat m1(2, 2), m2(2, 2);
    m1 << 1, 2, 0, 1;
    m2 << -1, 1, 0, -1;
    for (const Mat& m : {m1, m2}) {
        const auto quad = eigen_quadruples(m);
        int count_unit = 0;
        for (const auto& g : quad.groups)
            for (const auto& s : g)
                if (std::abs(std::abs(s) - 1.0) <= 1e-8) ++count_unit;
        CHECK(count_unit % 2 == 0);
    }
}

TEST_CASE("spectral nudge reaches the circle within budget") {
    SECTION("weakly hyperbolic trace is pulled to the boundary") {
        // trace 2 + 1e-3 with generic shear shapes
        const double lam = 1.0 + std::sqrt(1e-3);  // trace ~ 2 + 1e-3
        for (double shear : {0.4, -0.7}) {
            Mat A(2, 2);
            A << lam, shear, 0.0, 1.0 / lam;
            REQUIRE(A.trace() > 2.0);
            REQUIRE(A.trace() < 2.0 + 2e-3);
            const Mat An = spectral_nudge(A, 1e-2);
            CHECK(std::abs(An.trace()) <= 2.0);
            CHECK(detail::opnorm(An - A) <= 1e-2);
            CHECK(symplectic_defect(An) <= 1e-10);
        }
        // normal (diagonal) shape: the spectrum sits lam - 1 off the circle,
        // so by Bauer-Fike no perturbation below that distance reaches it;
        // a budget above lam - 1 succeeds, one below must refuse
        Mat D = Mat::Zero(2, 2);
        D(0, 0) = lam;
        D(1, 1) = 1.0 / lam;
        CHECK_THROWS_AS(spectral_nudge(D, 1e-2), NudgeOutOfReach);
        const Mat Dn = spectral_nudge(D, 0.05);
        CHECK(std::abs(Dn.trace()) <= 2.0);
        CHECK(detail::opnorm(Dn - D) <= 0.05);
    }
    SECTION("elliptic input is untouched") {
        const Mat A = rot2(0.7);
        const Mat An = spectral_nudge(A, 1e-3);
        CHECK((An - A).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("spectral gap far beyond the budget") {
        Mat A = Mat::Zero(2, 2);
        A(0, 0) = 3.0;
        A(1, 1) = 1.0 / 3.0;
        CHECK_THROWS_AS(spectral_nudge(A, 1e-3), NudgeOutOfReach);
    }
    SECTION("block-diagonal composition nudges the reachable block") {
        Mat A = Mat::Zero(4, 4);
        A(0, 0) = 3.0;
        A(1, 1) = 1.0 / 3.0;           // far block
        const double lam = 1.0 + 2e-2;  // near block, trace ~ 2 + 4e-4
        A(2, 2) = lam;
        A(3, 3) = 1.0 / lam;
        const Mat An = spectral_nudge(A, 0.05);
        CHECK(detail::opnorm(An - A) <= 0.05);
        // the nudged block certifies unit-modulus spectrum through trace and
        // determinant (an eigensolver cannot resolve a parabolic pair better
        // than sqrt(eps))
        const Mat blk = An.bottomRightCorner(2, 2);
        CHECK(std::abs(blk.trace()) <= 2.0);
        CHECK(std::abs(blk.determinant() - 1.0) <= 1e-12);
        CHECK((An.topLeftCorner(2, 2) - A.topLeftCorner(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    }
    SECTION("non-symplectic input is rejected") {
        Mat A(2, 2);
        A << 2, 0, 0, 1;
        CHECK_THROWS_AS(spectral_nudge(A, 0.1), Error);
    }
}

TEST_CASE("rational rotation approximation") {
    SECTION("named values") {
        const auto [p1, q1] = rationalize_rotation(2 * M_PI / 3.0, 1e-6);
        CHECK(p1 == 1);
        CHECK(q1 == 3);
        const auto [p0, q0] = rationalize_rotation(0.0, 1e-6);
        CHECK(p0 == 0);
        CHECK(q0 == 1);
    }
    SECTION("theta = 1 at delta = 1e-4") {
        const auto [p, q] = rationalize_rotation(1.0, 1e-4);
        CHECK(std::abs(2 * M_PI * p / static_cast<double>(q) - 1.0) <= 1e-4);
        CHECK(q <= 10000);
        // rot(2pi p / q)^q = I
        Mat R = Mat::Identity(2, 2);
        const Mat step = rot2(2 * M_PI * static_cast<double>(p) / static_cast<double>(q));
        for (int i = 0; i < q; ++i) R = step * R;
        CHECK((R - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SECTION("minimal denominator against brute force") {
        std::mt19937_64 rng(47);
        std::uniform_real_distribution<double> u(-4.0, 7.0);
        for (int k = 0; k < 40; ++k) {
            const double theta = u(rng);
            const double delta = std::pow(10.0, -1.0 - 3.0 * std::uniform_real_distribution<double>(0, 1)(rng));
            const auto [p, q] = rationalize_rotation(theta, delta);
            CHECK(std::abs(2 * M_PI * p / static_cast<double>(q) - theta) <= delta);
            // brute force: no smaller q admits any p
            const double x = theta / (2 * M_PI), tol = delta / (2 * M_PI);
            for (std::int64_t qq = 1; qq < q; ++qq) {
                const auto pp = static_cast<std::int64_t>(std::llround(x * static_cast<double>(qq)));
                CHECK(std::abs(x - static_cast<double>(pp) / static_cast<double>(qq)) > tol);
            }
        }
    }
}

TEST_CASE("computed monodromies satisfy the symplectic spectrum closure") {
    auto sys = make_saddle_center();
    const Vec seed = vec({0.0, 1.0, 0.0, 0.0});
    const auto orbit = find_periodic(sys, seed, AffineSection::through(sys, seed));
    const auto quad = eigen_quadruples(orbit.monodromy);
    CHECK(quad.pairing_defect <= 1e-6);
    CHECK(std::abs(orbit.monodromy.determinant() - 1.0) <= 1e-6);
}
