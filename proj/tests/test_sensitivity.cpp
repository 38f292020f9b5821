#include <random>

#include "doctest.h"
#include "vtherm/sensitivity.hpp"

using namespace vtherm;

namespace {

constexpr double kMlMin = 1.0 / 60000000.0;

PhysicalParams table1(double q_ml_min, double kappa = 3.2110) {
    PhysicalParams p;
    p.kappa = ElementField(kappa);
    p.Q = q_ml_min * kMlMin;
    return p;
}

struct Case {
    TriMesh mesh;
    VasculaturePath path;
};

Case make(VascularKind kind, int n = 100, double spacing = 0.02) {
    Case c{build_structured_mesh(0.1, 0.1, n, n), {}};
    VascularCase vc;
    vc.kind = kind;
    vc.spacing_l = spacing;
    c.path = make_case(vc, c.mesh);
    return c;
}

}  // namespace

TEST_CASE("heat flux field") {
    const auto m = build_structured_mesh(0.1, 0.1, 8, 8);
    SUBCASE("uniform temperature carries no flux") {
        TemperatureField f;
        f.values.assign(m.node_count(), 320.0);
        const auto q = heat_flux(m, table1(1.0), f);
        for (const Vec2& v : q.q) {
            CHECK(std::abs(v.x) <= 1e-9);
            CHECK(std::abs(v.y) <= 1e-9);
        }
    }
    SUBCASE("linear-in-x field with kappa = 2") {
        TemperatureField f;
        f.values.resize(m.node_count());
        for (int i = 0; i < m.node_count(); ++i) f.values[i] = m.nodes[i].x;
        const auto q = heat_flux(m, table1(1.0, 2.0), f);
        for (const Vec2& v : q.q) {
            CHECK(v.x == doctest::Approx(-2.0).epsilon(1e-12));
            CHECK(std::abs(v.y) <= 1e-10);
        }
    }
}

TEST_CASE("opposing fluxes between the U-shape legs") {
    const auto c = make(VascularKind::u_shape);
    const auto p = table1(1.0);
    const auto fwd = solve_direct(c.mesh, c.path, p);
    const auto rev = solve_reverse(c.mesh, c.path, p);
    const auto qf = heat_flux(c.mesh, p, fwd);
    const auto qr = heat_flux(c.mesh, p, rev);
    // area-weighted q_f . q_r over the strip sandwiched between the legs
    double acc = 0.0;
    double mag = 0.0;
    for (int e = 0; e < c.mesh.element_count(); ++e) {
        Vec2 centroid{0.0, 0.0};
        for (int a : c.mesh.elements[e]) centroid = centroid + c.mesh.nodes[a];
        centroid = (1.0 / 3.0) * centroid;
        if (centroid.x > 0.041 && centroid.x < 0.059 && centroid.y > 0.03 &&
            centroid.y < 0.09) {
            acc += c.mesh.element_areas[e] * dot(qf.q[e], qr.q[e]);
            mag += c.mesh.element_areas[e] * norm(qf.q[e]) * norm(qr.q[e]);
        }
    }
    CHECK(acc < 0.0);
    CHECK(acc < -0.5 * mag);  // strongly opposed, not marginal
}

TEST_CASE("chi sensitivity: compact expression") {
    SUBCASE("zero power gives zero sensitivity") {
        const auto c = make(VascularKind::straight, 30);
        auto p0 = table1(1.0);
        p0.f = ElementField(0.0);
        const auto fwd = solve_direct(c.mesh, c.path, p0);
        const auto rev = solve_reverse(c.mesh, c.path, p0);
        p0.f = ElementField(1000.0);  // f0 > 0 in the prefactor
        CHECK(std::abs(sensitivity_chi(c.path, fwd, rev, p0)) <= 1e-9);
        const auto ks = sensitivity_kappa(c.mesh, fwd, rev, p0);
        CHECK(std::abs(ks.uniform_total) <= 1e-9);
    }
    SUBCASE("fields from another mesh are rejected") {
        const auto c = make(VascularKind::straight, 30);
        const auto other = make(VascularKind::straight, 20);
        const auto p = table1(1.0);
        const auto fwd = solve_direct(other.mesh, other.path, p);
        CHECK_THROWS_AS(sensitivity_chi(c.path, fwd, fwd, p), std::invalid_argument);
    }
    SUBCASE("nonuniform f is rejected") {
        const auto c = make(VascularKind::straight, 10);
        auto p = table1(1.0);
        std::vector<double> f(c.mesh.element_count(), 1000.0);
        f[0] = 900.0;
        p.f = ElementField::per_element(f);
        const auto fwd = solve_direct(c.mesh, c.path, p);
        CHECK_THROWS_AS(sensitivity_chi(c.path, fwd, fwd, p), std::invalid_argument);
        CHECK_THROWS_AS(sensitivity_kappa(c.mesh, fwd, fwd, p), std::invalid_argument);
    }
}

TEST_CASE("chi sensitivity is nonpositive over the case grid" * doctest::timeout(300)) {
    // straight and U-shape at 100x100; U with l = 5 mm and the serpentine at
    // coarser conforming resolutions to keep the suite quick
    struct Grid {
        VascularKind kind;
        int n;
        double spacing;
    };
    const Grid grids[] = {{VascularKind::straight, 100, 0.0},
                          {VascularKind::u_shape, 100, 0.02},
                          {VascularKind::u_shape, 40, 0.005},
                          {VascularKind::serpentine, 50, 0.0}};
    for (const auto& g : grids) {
        const auto c = make(g.kind, g.n, g.spacing);
        for (double kappa : {0.6360, 3.2110, 11.2}) {
            for (double q : {0.5, 2.0}) {
                const auto p = table1(q, kappa);
                const auto fwd = solve_direct(c.mesh, c.path, p);
                const auto rev = solve_reverse(c.mesh, c.path, p);
                const double s = sensitivity_chi(c.path, fwd, rev, p);
                CHECK(s <= 1e-9);
            }
        }
    }
}

TEST_CASE("kappa sensitivity: gradient and flux forms agree elementwise") {
    const auto c = make(VascularKind::u_shape, 60);
    const auto p = table1(1.0);
    const auto fwd = solve_direct(c.mesh, c.path, p);
    const auto rev = solve_reverse(c.mesh, c.path, p);
    const auto ks = sensitivity_kappa(c.mesh, fwd, rev, p);
    const auto qf = heat_flux(c.mesh, p, fwd);
    const auto qr = heat_flux(c.mesh, p, rev);
    const double f0 = 1000.0;
    for (int e = 0; e < c.mesh.element_count(); ++e) {
        const double k = p.kappa.at(e);
        const double flux_form =
            -(p.d / (f0 * k * k)) * c.mesh.element_areas[e] * dot(qf.q[e], qr.q[e]);
        CHECK(flux_form ==
              doctest::Approx(ks.per_element[e]).epsilon(1e-12).scale(1e-30));
    }
    // and the flux-form integral is the exact negation scaled by f0
    const double integral = flux_form_integral(c.mesh, p, qf, qr);
    CHECK(integral == doctest::Approx(-f0 * ks.uniform_total).epsilon(1e-12));
}

TEST_CASE("kappa sensitivity signs") {
    SUBCASE("straight channel: aligned fluxes, negative sensitivity") {
        const auto c = make(VascularKind::straight);
        const auto p = table1(2.0);
        const auto fwd = solve_direct(c.mesh, c.path, p);
        const auto rev = solve_reverse(c.mesh, c.path, p);
        CHECK(sensitivity_kappa(c.mesh, fwd, rev, p).uniform_total < 0.0);
    }
    SUBCASE("U-shape sweep crosses zero") {
        const auto c = make(VascularKind::u_shape);
        bool pos = false, neg = false;
        for (double kappa : {0.3, 1.0, 3.211, 6.0, 12.0}) {
            const auto p = table1(1.0, kappa);
            const auto fwd = solve_direct(c.mesh, c.path, p);
            const auto rev = solve_reverse(c.mesh, c.path, p);
            const double s = sensitivity_kappa(c.mesh, fwd, rev, p).uniform_total;
            (s > 0.0 ? pos : neg) = true;
        }
        CHECK(pos);
        CHECK(neg);
    }
}

TEST_CASE("sign mechanism: positive sensitivity means opposing fluxes") {
    const auto c = make(VascularKind::u_shape);
    const auto p = table1(1.0);  // CFRP sits on the positive branch
    const auto fwd = solve_direct(c.mesh, c.path, p);
    const auto rev = solve_reverse(c.mesh, c.path, p);
    const auto ks = sensitivity_kappa(c.mesh, fwd, rev, p);
    const auto qf = heat_flux(c.mesh, p, fwd);
    const auto qr = heat_flux(c.mesh, p, rev);
    REQUIRE(ks.uniform_total > 0.0);
    CHECK(flux_form_integral(c.mesh, p, qf, qr) < 0.0);
}

TEST_CASE("adjoint equals the reverse-flow problem") {
    // the adjoint boundary value problem is the reverse problem: solving the
    // flipped-sign system on the original path must match the forward solve
    // of the reversed path
    const auto c = make(VascularKind::u_shape, 60);
    const auto p = table1(1.0);
    const auto rev = solve_reverse(c.mesh, c.path, p);
    const auto flipped = reverse_orientation(c.path);
    const auto direct_on_flipped = solve_direct(c.mesh, flipped, p);
    double dev = 0.0;
    for (int i = 0; i < c.mesh.node_count(); ++i) {
        dev = std::max(dev, std::abs(rev.values[i] - direct_on_flipped.values[i]));
    }
    CHECK(dev <= 1e-8);
}

TEST_CASE("discrete adjoint converges to the reverse-flow field") {
    const auto p = table1(1.0);
    double prev = 1e30;
    for (int n : {50, 100}) {
        const auto c = make(VascularKind::straight, n);
        const auto rev = solve_reverse(c.mesh, c.path, p);
        const auto dg = discrete_gradients(c.mesh, c.path, p);
        // f0 * mu + theta_amb ~ theta_r, compared in the L2 norm
        double num = 0.0, den = 0.0;
        for (int i = 0; i < c.mesh.node_count(); ++i) {
            const double mu_t = 1000.0 * dg.adjoint[i] + p.theta_amb;
            num += (mu_t - rev.values[i]) * (mu_t - rev.values[i]);
            den += (rev.values[i] - p.theta_amb) * (rev.values[i] - p.theta_amb);
        }
        const double rel = std::sqrt(num / den);
        CHECK(rel < 0.05);
        CHECK(rel < prev);
        prev = rel;
    }
}

TEST_CASE("gradient checks against the finite-difference oracle" * doctest::timeout(300)) {
    for (auto kind : {VascularKind::straight, VascularKind::u_shape}) {
        const auto c = make(kind);
        const auto p = table1(1.0);
        const auto dg = discrete_gradients(c.mesh, c.path, p);
        const double fd_chi = fd_oracle(c.mesh, c.path, p, FdTarget::chi);
        const double fd_kap = fd_oracle(c.mesh, c.path, p, FdTarget::kappa_uniform);
        CHECK(std::abs(dg.dphi_chi - fd_chi) <= 1e-2 * std::abs(fd_chi));
        CHECK(std::abs(dg.dphi_kappa_uniform - fd_kap) <= 1e-2 * std::abs(fd_kap));
        // the compact line-integral expression agrees with FD in sign and scale
        const auto fwd = solve_direct(c.mesh, c.path, p);
        const auto rev = solve_reverse(c.mesh, c.path, p);
        const double compact = sensitivity_chi(c.path, fwd, rev, p);
        CHECK(compact / fd_chi > 0.0);
        CHECK(std::abs(compact - fd_chi) <= 0.05 * std::abs(fd_chi));
    }
}

TEST_CASE("per-element kappa sensitivities match FD on sampled elements" *
          doctest::timeout(300)) {
    const auto c = make(VascularKind::u_shape, 60);
    const auto p = table1(1.0);
    const auto dg = discrete_gradients(c.mesh, c.path, p);
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> pick(0, c.mesh.element_count() - 1);
    const double phi_scale = std::abs(field_integral(
        c.mesh, solve_direct(c.mesh, c.path, p).values));
    int checked = 0;
    while (checked < 5) {
        const int e = pick(rng);
        const double fd = fd_oracle(c.mesh, c.path, p, FdTarget::kappa_element, e, 1e-2);
        if (std::abs(fd) <= 1e-12 * phi_scale) continue;  // signal too small
        CHECK(std::abs(dg.dphi_kappa[e] - fd) <= 5e-2 * std::abs(fd));
        ++checked;
    }
}

TEST_CASE("fd oracle input validation") {
    const auto c = make(VascularKind::straight, 10);
    const auto p = table1(1.0);
    CHECK_THROWS_AS(fd_oracle(c.mesh, c.path, p, FdTarget::chi, -1, 1e-7),
                    std::invalid_argument);
    CHECK_THROWS_AS(fd_oracle(c.mesh, c.path, p, FdTarget::kappa_element, -1),
                    std::out_of_range);
    CHECK_THROWS_AS(fd_oracle(c.mesh, c.path, table1(0.0), FdTarget::chi),
                    std::invalid_argument);
}

TEST_CASE("sensitivity report bundles both routes") {
    const auto c = make(VascularKind::straight, 50);
    const auto p = table1(1.0);
    const auto fwd = solve_direct(c.mesh, c.path, p);
    const auto rev = solve_reverse(c.mesh, c.path, p);
    const auto rep = sensitivity_report(c.mesh, c.path, p, fwd, rev, /*with_fd=*/true);
    CHECK(rep.rel_err_chi <= 1e-2);
    CHECK(rep.rel_err_kappa <= 1e-2);
    CHECK(rep.dphi_chi < 0.0);
    CHECK(rep.dphi_chi_discrete < 0.0);
    CHECK(rep.dmst_chi == doctest::Approx(rep.dphi_chi / 0.01).epsilon(1e-12));
    CHECK(rep.dphi_kappa_field.size() == static_cast<size_t>(c.mesh.element_count()));
}
