// Document schemas and CSV writers.

#include "hamshade/io.hpp"

#include "test_util.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace hamshade;
using testutil::vec;

TEST_CASE("system documents round-trip") {
    SECTION("builtins by name") {
        const json doc = {{"name", "x"}, {"builtin", "harmonic"}, {"n", 2}, {"polynomial", nullptr}};
        auto sys = system_from_json(doc);
        CHECK(sys.name() == "harmonic");
        CHECK(sys.dof() == 2);
    }
    SECTION("user polynomial") {
        const json doc = {{"name", "squeeze"},
                          {"builtin", nullptr},
                          {"n", 2},
                          {"polynomial", json::array({{{"coeff", 1.0}, {"powers", {1, 0, 1, 0}}},
                                                      {{"coeff", 0.5}, {"powers", {0, 2, 0, 0}}},
                                                      {{"coeff", 0.5}, {"powers", {0, 0, 0, 2}}}})}};
        auto sys = system_from_json(doc);
        CHECK(sys.name() == "squeeze");
        // same polynomial as the saddle-center builtin
        auto ref = make_saddle_center();
        const Vec x = vec({0.3, -0.2, 0.7, 0.1});
        CHECK(sys.eval_h(x) == Catch::Approx(ref.eval_h(x)));
        CHECK((sys.grad(x) - ref.grad(x)).norm() <= 1e-14);

        const json back = system_to_json(sys);
        auto sys2 = system_from_json(back);
        CHECK(sys2.eval_h(x) == Catch::Approx(sys.eval_h(x)));
    }
    SECTION("schema violations") {
        CHECK_THROWS_AS(system_from_json(json::array()), ConfigError);
        CHECK_THROWS_AS(system_from_json({{"builtin", nullptr}, {"n", 1}, {"polynomial", json::array()}}),
                        ConfigError);
        CHECK_THROWS_AS(system_from_json({{"builtin", nullptr}, {"n", 2}, {"polynomial", nullptr}}), ConfigError);
        const json badpow = {{"builtin", nullptr},
                             {"n", 2},
                             {"polynomial", json::array({{{"coeff", 1.0}, {"powers", {1, 0}}}})}};
        CHECK_THROWS_AS(system_from_json(badpow), ConfigError);
    }
}

TEST_CASE("section and pseudo-orbit documents") {
    auto sys = make_harmonic();
    const json secdoc = {{"normal", {0.0, 0.0, 1.0, 0.0}}, {"offset", 0.0}, {"direction", -1}};
    const auto sec = section_from_json(secdoc, 4);
    CHECK(sec.normal[2] == 1.0);
    CHECK(sec.direction == -1);
    CHECK_THROWS_AS(section_from_json(secdoc, 6), ConfigError);

    // pseudo-orbit file round trip
    std::vector<Vec> pts;
    std::vector<double> times;
    for (int i = 0; i < 4; ++i) {
        pts.push_back(vec({1.0 + 0.001 * i, 0.0, 0.0, 0.0}));
        times.push_back(2 * M_PI);
    }
    const auto po = build_pseudo_orbit(sys, pts, times, 0.01, 1.0);
    const json doc = pseudo_orbit_to_json(po);
    const auto back = pseudo_orbit_from_json(sys, doc);
    CHECK(back.size() == po.size());
    CHECK(back.delta == po.delta);
    for (int i = 0; i < po.size(); ++i)
        CHECK((back.points[static_cast<size_t>(i)] - po.points[static_cast<size_t>(i)]).norm() == 0.0);
}

TEST_CASE("report schemas carry the required fields") {
    auto sys = make_saddle_center();
    const Vec seed = vec({0.0, 1.0, 0.0, 0.0});
    const auto orbit = find_periodic(sys, seed, AffineSection::through(sys, seed));
    const json odoc = orbit_report_json(orbit);
    CHECK(odoc.contains("point"));
    CHECK(odoc.contains("period"));
    CHECK(odoc.contains("residual"));
    CHECK(odoc["eigenvalues"].size() == 2);
    CHECK(odoc["eigenvalues"][0].contains("modulus"));
    CHECK(odoc["classification"] == "hyperbolic");

    SplittingReport rep;
    rep.verdict = Verdict::Holds;
    rep.scale = 0.7;
    rep.worst_product = 0.43;
    rep.witness = 3;
    rep.block_dims = {1, 1};
    const json sdoc = splitting_report_json(rep);
    CHECK(sdoc["verdict"] == "holds");
    CHECK(sdoc["witness_index"] == 3);
    CHECK(sdoc["theta"] == 0.5);

    ShadowReport srep;
    srep.success = true;
    srep.z = seed;
    srep.alpha = Reparametrization::identity(0.1);
    srep.achieved_eps = 0.01;
    srep.budget_spent = 42;
    const json shdoc = shadow_report_json(srep);
    CHECK(shdoc["success"] == true);
    CHECK(shdoc["budget_spent"] == 42);
    CHECK(shdoc["alpha"]["epsilon_class"] == 0.1);
}

TEST_CASE("trajectory CSV format") {
    auto sys = make_harmonic();
    FlowPolicy pol;
    pol.record_dt = 0.5;
    const auto traj = integrate(sys, vec({1.0, 0.0, 0.0, 0.5}), 2.0, pol);
    const std::string csv = trajectory_csv(sys, traj);
    std::istringstream lines(csv);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "t,q1,q2,p1,p2,energy_error");
    int rows = 0;
    std::string row;
    while (std::getline(lines, row)) ++rows;
    CHECK(rows == static_cast<int>(traj.times.size()));
}

TEST_CASE("spectrum CSV accumulates progress rows") {
    SpectrumCsv csv(2);
    csv.add_row(1.0, {0.5, -0.5});
    csv.add_row(2.0, {0.4, -0.4});
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "T,lambda_1,lambda_2,pairing_defect,sum_defect");
    std::string r1;
    std::getline(lines, r1);
    CHECK(r1 == "1,0.5,-0.5,0,0");
}

TEST_CASE("atomic writes land complete files") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "hamshade_io_test";
    fs::remove_all(dir);
    const fs::path f = dir / "sub" / "report.json";
    write_json(f, {{"ok", true}});
    std::ifstream in(f);
    REQUIRE(in.good());
    json doc;
    in >> doc;
    CHECK(doc["ok"] == true);
    CHECK_FALSE(fs::exists(f.string() + ".tmp"));
    fs::remove_all(dir);
}
