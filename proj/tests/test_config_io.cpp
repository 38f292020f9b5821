#include <sstream>

#include "doctest.h"
#include "vtherm/run.hpp"

using namespace vtherm;

TEST_CASE("config parsing") {
    SUBCASE("material preset expands to the Table 1 conductivity") {
        const auto cfg = parse_config("geometry = straight\nmaterial = CFRP\n");
        CHECK(cfg.params.kappa.uniform_value() == 3.2110);
        CHECK(parse_config("geometry = straight\nmaterial = GFRP\n")
                  .params.kappa.uniform_value() == 0.6360);
        CHECK(parse_config("geometry = straight\nmaterial = In718\n")
                  .params.kappa.uniform_value() == 11.2);
    }
    SUBCASE("flow rate unit conversion is the exact rational") {
        const auto cfg = parse_config("geometry = straight\nQ = 1 mL/min\n");
        CHECK(cfg.params.Q == 1.0 / 60000000.0);
        CHECK(cfg.params.Q == doctest::Approx(1.66667e-8).epsilon(1e-5));
    }
    SUBCASE("millimetres and celsius convert") {
        const auto cfg = parse_config(
            "geometry = straight\nd = 5 mm\ntheta_amb = 22 C\nL = 100 mm\nH = 100 mm\n");
        CHECK(cfg.params.d == doctest::Approx(0.005).epsilon(1e-15));
        CHECK(cfg.params.theta_amb == doctest::Approx(295.15).epsilon(1e-15));
        CHECK(cfg.domain_length == doctest::Approx(0.1).epsilon(1e-15));
    }
    SUBCASE("validation errors name the key") {
        CHECK_THROWS_WITH_AS(parse_config("geometry = straight\nh_T = -3\n"),
                             doctest::Contains("h_T"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("geometry = straight\nbogus = 1\n"),
                             doctest::Contains("bogus"), ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("material = CFRP\n"),
                             doctest::Contains("geometry"), ConfigError);
        CHECK_THROWS_WITH_AS(
            parse_config("geometry = straight\nsweep = Q\nsweep_values = 2 1\n"),
            doctest::Contains("strictly increasing"), ConfigError);
        CHECK_THROWS_AS(parse_config("geometry = nowhere\n"), ConfigError);
        CHECK_THROWS_AS(parse_config("geometry = straight\nQ = 1 barrel/day\n"),
                        ConfigError);
        CHECK_THROWS_WITH_AS(parse_config("geometry = straight\nnx = 10\nnx = 20\n"),
                             doctest::Contains("duplicate"), ConfigError);
    }
    SUBCASE("sweep over kappa") {
        const auto cfg = parse_config(
            "geometry = u_shape\nspacing_l = 20 mm\nsweep = kappa\n"
            "sweep_values = 0.3 1 3.211 12\n");
        REQUIRE(cfg.sweep.has_value());
        CHECK(cfg.sweep->parameter == SweepParameter::kappa);
        CHECK(cfg.sweep->values == std::vector<double>{0.3, 1.0, 3.211, 12.0});
    }
    SUBCASE("Q sweep defaults to Q_list") {
        const auto cfg =
            parse_config("geometry = straight\nQ_list = 0.5 1 2 4\nsweep = Q\n");
        REQUIRE(cfg.sweep.has_value());
        REQUIRE(cfg.sweep->values.size() == 4);
        CHECK(cfg.sweep->values[0] == 0.5 / 60000000.0);
        CHECK(cfg.params.Q == 0.5 / 60000000.0);
    }
    SUBCASE("polyline waypoints") {
        const auto cfg = parse_config(
            "geometry = polyline\nwaypoints = (0.0,0.05) (0.1,0.05)\n");
        REQUIRE(cfg.geometry.waypoints.size() == 2);
        CHECK(cfg.geometry.waypoints[1].x == 0.1);
        CHECK(cfg.geometry.waypoints[1].y == 0.05);
    }
}

TEST_CASE("sweep CSV format") {
    SUBCASE("header is the documented contract") {
        CHECK(std::string(kSweepCsvHeader) ==
              "param,mst_K,theta_out_K,eta,dphi_chi,dphi_kappa,inv_gap_K,energy_res_W");
    }
    SUBCASE("empty sweep keeps the header") {
        CHECK(sweep_csv({}) == std::string(kSweepCsvHeader) + "\n");
    }
    SUBCASE("failed rows carry the marker") {
        SweepRow r;
        r.param = 2.0;
        r.failed = true;
        r.error = "boom";
        const auto csv = sweep_csv({r});
        CHECK(csv.find("2,failed,failed,failed,failed,failed,failed,failed\n") !=
              std::string::npos);
    }
}

TEST_CASE("vtk export round trip of the node count") {
    const auto mesh = build_structured_mesh(0.06, 0.04, 6, 4);
    VtkFields fields;
    fields.point_scalars.emplace_back("temperature_K",
                                      std::vector<double>(mesh.node_count(), 300.0));
    fields.cell_scalars.emplace_back("dphi_kappa",
                                     std::vector<double>(mesh.element_count(), 0.0));
    fields.cell_vectors.emplace_back(
        "heat_flux_W_per_m2", std::vector<Vec2>(mesh.element_count(), Vec2{1.0, 0.0}));
    const std::string vtk = vtk_unstructured(mesh, fields);

    // reparse POINTS/CELLS counts
    std::istringstream in(vtk);
    std::string tok;
    int points = -1, cells = -1;
    while (in >> tok) {
        if (tok == "POINTS") in >> points;
        if (tok == "CELLS") in >> cells;
    }
    CHECK(points == mesh.node_count());
    CHECK(cells == mesh.element_count());
    CHECK(vtk.find("SCALARS temperature_K double 1") != std::string::npos);
    CHECK(vtk.find("VECTORS heat_flux_W_per_m2 double") != std::string::npos);

    VtkFields bad;
    bad.point_scalars.emplace_back("t", std::vector<double>(3, 0.0));
    CHECK_THROWS_AS(vtk_unstructured(mesh, bad), std::invalid_argument);
}

TEST_CASE("run_case produces a consistent row" * doctest::timeout(300)) {
    const auto cfg = parse_config(
        "geometry = straight\nmaterial = CFRP\nQ = 1 mL/min\nnx = 50\nny = 50\n");
    const auto setup = build_case(cfg);
    const auto res = run_case(cfg, setup, /*with_fd=*/false);
    CHECK(res.row.mst < res.qoi.hss_mean);
    CHECK(res.row.mst > cfg.params.theta_amb);
    CHECK(res.row.param == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.row.theta_out > cfg.params.theta_amb);
    CHECK(std::abs(res.row.energy_res) <= 1e-8 * 10.0);

    SUBCASE("chi = 0 run matches the HSS mean") {
        auto cfg0 = cfg;
        cfg0.params.Q = 0.0;
        const auto res0 = run_case(cfg0, setup, false);
        CHECK(std::abs(res0.qoi.mst - res0.qoi.hss_mean) <= 1e-6);
        CHECK(res0.qoi.invariance_gap == 0.0);
    }
}

TEST_CASE("run_sweep: ordering, determinism, failure isolation" * doctest::timeout(300)) {
    const auto cfg = parse_config(
        "geometry = straight\nmaterial = CFRP\nnx = 40\nny = 40\n"
        "sweep = Q\nsweep_values = 0.5 1 2\n");
    const auto setup = build_case(cfg);
    const auto rows1 = run_sweep(cfg, setup, 1);
    const auto rows3 = run_sweep(cfg, setup, 3);
    REQUIRE(rows1.size() == 3);

    SUBCASE("rows ordered by parameter and MST nonincreasing") {
        CHECK(rows1[0].param == doctest::Approx(0.5));
        CHECK(rows1[2].param == doctest::Approx(2.0));
        CHECK(rows1[1].mst <= rows1[0].mst + 1e-6);
        CHECK(rows1[2].mst <= rows1[1].mst + 1e-6);
    }
    SUBCASE("worker count does not change the bytes") {
        CHECK(sweep_csv(rows1) == sweep_csv(rows3));
    }
    SUBCASE("repeat runs are bit-identical") {
        CHECK(sweep_csv(run_sweep(cfg, setup, 2)) == sweep_csv(rows1));
    }
}

TEST_CASE("a failing sweep point does not abort the sweep") {
    auto cfg = parse_config(
        "geometry = straight\nmaterial = CFRP\nnx = 20\nny = 20\nsweep = Q\n");
    // a negative flow rate violates the parameter invariants at solve time
    cfg.sweep->values = {-1.0 / 60000000.0, 1.0 / 60000000.0};
    const auto setup = build_case(cfg);
    const auto rows = run_sweep(cfg, setup, 1);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].failed);
    CHECK_FALSE(rows[0].error.empty());
    CHECK_FALSE(rows[1].failed);
    CHECK(rows[1].mst > 295.15);
    const auto csv = sweep_csv(rows);
    CHECK(csv.find("failed") != std::string::npos);
}

TEST_CASE("bundled checks pass on the reference case and flag under-resolution" *
          doctest::timeout(600)) {
    const auto good = parse_config(
        "geometry = straight\nmaterial = CFRP\nQ = 1 mL/min\nnx = 100\nny = 100\n");
    int failures = 0;
    for (const auto& c : run_checks(good)) failures += c.passed ? 0 : 1;
    CHECK(failures == 0);

    const auto coarse = parse_config(
        "geometry = straight\nmaterial = CFRP\nQ = 1 mL/min\nnx = 4\nny = 4\n");
    int coarse_failures = 0;
    for (const auto& c : run_checks(coarse)) coarse_failures += c.passed ? 0 : 1;
    CHECK(coarse_failures > 0);
}
