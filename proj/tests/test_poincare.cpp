// Transversal frame construction, induced symplectic form, the transversal
// linear Poincaré flow, and section return maps.

#include "hamshade/poincare.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace hamshade;

namespace {

Vec make_point(std::initializer_list<double> vals) {
    Vec v(static_cast<int>(vals.size()));
    int i = 0;
    for (double c : vals) v[i++] = c;
    return v;
}

// Bounded sampling regions: Hénon–Heiles orbits escape the cubic well at
// larger amplitudes, so its samples stay small.
Vec random_regular_point(const HamiltonianSystem& sys, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const double amp = sys.name() == "henon-heiles" ? 0.15 : 0.5;
    for (int attempt = 0; attempt < 100; ++attempt) {
        Vec x(sys.dim());
        for (int i = 0; i < sys.dim(); ++i) x[i] = 0.3 * amp + amp * u(rng);
        if (sys.is_regular(x)) return x;
    }
    throw std::runtime_error("no regular point found");
}

}  // namespace

TEST_CASE("frame orthonormality and double orthogonality") {
    std::mt19937_64 rng(23);
    for (const char* name : {"harmonic", "henon-heiles", "saddle-center"}) {
        auto sys = make_builtin(name);
        for (int k = 0; k < 20; ++k) {
            const Vec x = random_regular_point(sys, rng);
            const auto fr = transversal_frame(sys, x);
            REQUIRE(fr.basis.cols() == 2);  // 2n-2 with n = 2
            const Mat gram = fr.basis.transpose() * fr.basis;
            CHECK((gram - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
            CHECK((fr.basis.transpose() * sys.field(x)).cwiseAbs().maxCoeff() <= 1e-12 * sys.field(x).norm());
            CHECK((fr.basis.transpose() * sys.grad(x)).cwiseAbs().maxCoeff() <= 1e-12 * sys.grad(x).norm());
        }
    }
}

TEST_CASE("saddle-center frame spans the elliptic plane") {
    auto sys = make_saddle_center();
    const auto fr = transversal_frame(sys, make_point({1.0, 0.0, 0.0, 0.0}));
    // X_H = e_q1 and grad = e_p1 there, so the frame must span (q2, p2).
    for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(fr.basis(0, c)) <= 1e-14);
        CHECK(std::abs(fr.basis(2, c)) <= 1e-14);
    }
}

TEST_CASE("frame rejects singular points and trivial bundles") {
    auto sys = make_harmonic();
    CHECK_THROWS_AS(transversal_frame(sys, Vec::Zero(4)), SingularPoint);
    auto pedro = make_pedro();
    CHECK_THROWS_AS(transversal_frame(pedro, make_point({1.0, 0.0})), DimensionMismatch);
}

TEST_CASE("induced form on the standard elliptic plane") {
    auto sys = make_saddle_center();
    const auto fr = transversal_frame(sys, make_point({1.0, 0.0, 0.0, 0.0}));
    const Mat omega = induced_form(fr);
    // frame columns are (q2, p2) up to sign: omega is the standard 2x2 form
    // scaled by the orientation of the frame pair
    Mat expect(2, 2);
    expect << 0, 1, -1, 0;
    const double sign = fr.basis(1, 0) * fr.basis(3, 1) - fr.basis(3, 0) * fr.basis(1, 1);
    CHECK((omega - sign * expect).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("induced form is exactly skew and nondegenerate at regular points") {
    std::mt19937_64 rng(29);
    for (const char* name : {"harmonic", "henon-heiles", "saddle-center"}) {
        auto sys = make_builtin(name);
        for (int k = 0; k < 34; ++k) {
            const Vec x = random_regular_point(sys, rng);
            const auto fr = transversal_frame(sys, x);
            const Mat omega = induced_form(fr);
            CHECK((omega + omega.transpose()).cwiseAbs().maxCoeff() == 0.0);
            CHECK(std::abs(omega.determinant()) > 1e-12);
        }
    }
}

TEST_CASE("linear Poincare flow over a full harmonic period is the identity") {
    auto sys = make_harmonic();
    const auto lp = linear_poincare(sys, make_point({1.0, 0.2, 0.0, -0.1}), 2 * M_PI);
    CHECK((lp.P - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("linear Poincare flow on the saddle-center center plane") {
    auto sys = make_saddle_center();
    FlowPolicy pol;
    pol.step = 2e-4;
    const auto lp = linear_poincare(sys, make_point({1.0, 0.0, 0.0, 0.0}), 1.0, pol);
    // a rotation by t in the transversal plane, orientation per the frame
    CHECK(std::abs(lp.P.determinant() - 1.0) <= 1e-10);
    CHECK(std::abs(0.5 * lp.P.trace() - std::cos(1.0)) <= 1e-8);
    CHECK(std::abs(lp.P(0, 1)) + std::abs(lp.P(1, 0)) - 2 * std::abs(std::sin(1.0)) <= 1e-8);
    CHECK(poincare_symplectic_defect(lp) <= 1e-10);
}

TEST_CASE("Phi symplecticity across builtins and times") {
    std::mt19937_64 rng(31);
    // tangent truncation leaks O(h^2) into the energy direction; the |t| = 50
    // checks run at a finer step to stay within the 1e-8 bound
    FlowPolicy fine;
    fine.step = 2.5e-4;
    for (const char* name : {"harmonic", "henon-heiles", "saddle-center"}) {
        auto sys = make_builtin(name);
        const Vec x = random_regular_point(sys, rng);
        for (double t : {-50.0, -10.0, 1.0, 10.0, 50.0}) {
            const auto lp = linear_poincare(sys, x, t, fine);
            CHECK(poincare_symplectic_defect(lp) <= 1e-8);
            CHECK(std::abs(lp.P.determinant() - 1.0) <= 1e-6);
        }
    }
}

TEST_CASE("cocycle property with consistently chained frames") {
    auto sys = make_henon_heiles();
    const Vec x = make_point({0.0, -0.15, 0.38, 0.05});
    const double t1 = 1.3, t2 = 0.9;
    const auto leg1 = linear_poincare(sys, x, t1);
    // second leg starts from the first leg's arrival point, sharing its frame
    const auto leg2 = linear_poincare(sys, leg1.frame_dst.x, t2);
    const auto whole = linear_poincare(sys, x, t1 + t2);
    CHECK((whole.P - leg2.P * leg1.P).cwiseAbs().maxCoeff() <= 1e-6);

    // transported-frame chaining gives the same composite up to the final
    // change of orthonormal frame, so singular values agree
    const auto leg2t = linear_poincare_from(sys, leg1.frame_dst, t2);
    Eigen::JacobiSVD<Mat> sva(leg2t.P * leg1.P);
    Eigen::JacobiSVD<Mat> svb(whole.P);
    CHECK((sva.singularValues() - svb.singularValues()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("section return on the harmonic oscillator") {
    auto sys = make_harmonic();
    // section p1 = 0 crossed with decreasing p1 (q1 > 0 side)
    AffineSection sec;
    sec.normal = Vec::Unit(4, 2);
    sec.offset = 0.0;
    sec.direction = -1;
    const auto ret = section_return(sys, make_point({1.0, 0.3, 0.0, 0.1}), sec);
    CHECK(ret.tau == Catch::Approx(2 * M_PI).margin(1e-8));
    CHECK(std::abs(ret.y[2]) <= 1e-10);
    CHECK((ret.y - make_point({1.0, 0.3, 0.0, 0.1})).norm() <= 1e-5);
}

TEST_CASE("fixed point of the section map returns to itself") {
    auto sys = make_saddle_center();
    // elliptic orbit q1 = p1 = 0, circle in (q2, p2); section through the point
    const Vec x = make_point({0.0, 1.0, 0.0, 0.0});
    const auto sec = AffineSection::through(sys, x);
    const auto ret = section_return(sys, x, sec);
    CHECK(ret.tau == Catch::Approx(2 * M_PI).margin(1e-6));
    CHECK((ret.y - x).norm() <= 1e-6);
}

TEST_CASE("Henon-Heiles standard section at energy 1/8") {
    auto sys = make_henon_heiles();
    const Vec x0 = make_point({0.0, -0.25, 0.4208127057650866, 0.0});
    AffineSection sec;
    sec.normal = Vec::Unit(4, 0);  // q1 = 0
    sec.offset = 0.0;
    sec.direction = +1;  // crossings with q1_dot = p1 > 0
    const auto ret = section_return(sys, x0, sec);
    CHECK(std::abs(ret.y[0]) <= 1e-10);
    CHECK(ret.y[2] > 0);
    CHECK(std::abs(sys.eval_h(ret.y) - 0.125) <= 1e-6);
    CHECK(ret.tau > 0.5);
}

TEST_CASE("section errors") {
    auto sys = make_harmonic();
    // orbit of radius 1 in mode 1 never reaches q1 = 5
    AffineSection far;
    far.normal = Vec::Unit(4, 0);
    far.offset = 5.0;
    far.direction = +1;
    CHECK_THROWS_AS(section_return(sys, make_point({0.6, 0.0, 0.8, 0.0}), far, {}, 50.0), NoReturn);

    // flow tangent to the section at the start: saddle-center on the pure
    // hyperbolic orbit has q2 = p2 = 0 identically
    auto sc = make_saddle_center();
    AffineSection tangential;
    tangential.normal = Vec::Unit(4, 1);  // q2 = 0
    tangential.offset = 0.0;
    tangential.direction = +1;
    CHECK_THROWS_AS(section_return(sc, make_point({1.0, 0.0, 0.5, 0.0}), tangential), TangentialCrossing);
}
