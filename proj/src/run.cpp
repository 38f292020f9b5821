#include "vtherm/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

namespace vtherm {

namespace {

double param_in_csv_units(const RunConfig& cfg, double value) {
    if (cfg.sweep && cfg.sweep->parameter == SweepParameter::Q) {
        return value / kMlPerMinToM3PerS;  // report Q in mL/min
    }
    return value;
}

SweepRow row_from_result(double param, const QoiReport& qoi, const SensitivityReport& sens) {
    SweepRow row;
    row.param = param;
    row.mst = qoi.mst;
    row.theta_out = qoi.theta_outlet;
    row.eta = qoi.efficiency;
    row.dphi_chi = sens.dphi_chi;
    row.dphi_kappa = sens.dphi_kappa_uniform;
    row.inv_gap = qoi.invariance_gap;
    row.energy_res = qoi.energy_balance_residual;
    return row;
}

}  // namespace

CaseSetup build_case(const RunConfig& cfg) {
    CaseSetup s{build_structured_mesh(cfg.domain_length, cfg.domain_height, cfg.nx, cfg.ny,
                                      cfg.diagonal),
                {}};
    s.path = make_case(cfg.geometry, s.mesh);
    return s;
}

CaseResult run_case(const RunConfig& cfg, const CaseSetup& setup, bool with_fd) {
    const SolveOptions opts{cfg.solver_tolerance};
    CaseResult res;
    res.params_used = cfg.params;
    const double chi = heat_capacity_rate(cfg.params);

    // the compact sensitivity expressions are defined for uniform positive f
    const bool uniform_f = cfg.params.f.uniform() && cfg.params.f.uniform_value() > 0.0;

    if (chi == 0.0) {
        // no coolant flow: the problem is the hot steady state, identical for
        // both orientations
        res.forward = solve_hss(setup.mesh, cfg.params, opts);
        res.reverse = res.forward;
        res.qoi = equivalence_diagnostics(setup.mesh, setup.path, cfg.params, res.forward);
        res.qoi.invariance_gap = 0.0;
        if (uniform_f) {
            // evaluated on the no-flow field; zero for uniform f
            res.sens.dphi_chi =
                sensitivity_chi(setup.path, res.forward, res.reverse, cfg.params);
            auto ks = sensitivity_kappa(setup.mesh, res.forward, res.reverse, cfg.params);
            res.sens.dphi_kappa_field = std::move(ks.per_element);
            res.sens.dphi_kappa_uniform = ks.uniform_total;
            res.sens.dphi_chi_discrete = res.sens.dphi_chi;
            res.sens.dphi_kappa_uniform_discrete = res.sens.dphi_kappa_uniform;
            const double meas = setup.mesh.total_area();
            res.sens.dmst_chi = res.sens.dphi_chi / meas;
            res.sens.dmst_kappa_uniform = res.sens.dphi_kappa_uniform / meas;
        }
    } else {
        res.forward = solve_direct(setup.mesh, setup.path, cfg.params, opts);
        res.reverse = solve_reverse(setup.mesh, setup.path, cfg.params, opts);
        res.qoi = equivalence_diagnostics(setup.mesh, setup.path, cfg.params, res.forward);
        res.qoi.invariance_gap =
            std::abs(res.qoi.mst - mean_surface_temperature(setup.mesh, res.reverse.values));
        if (uniform_f) {
            res.sens = sensitivity_report(setup.mesh, setup.path, cfg.params, res.forward,
                                          res.reverse, with_fd, opts);
        }
    }
    res.row = row_from_result(cfg.params.Q / kMlPerMinToM3PerS, res.qoi, res.sens);
    return res;
}

std::vector<SweepRow> run_sweep(const RunConfig& cfg, const CaseSetup& setup, int workers,
                                const std::function<void(size_t, const CaseResult&)>&
                                    on_point) {
    if (!cfg.sweep) {
        throw std::invalid_argument("run_sweep needs a sweep section in the config");
    }
    const auto& values = cfg.sweep->values;
    std::vector<SweepRow> rows(values.size());

    auto eval_point = [&](size_t i) {
        RunConfig point = cfg;
        if (cfg.sweep->parameter == SweepParameter::Q) {
            point.params.Q = values[i];
        } else {
            point.params.kappa = ElementField(values[i]);
        }
        try {
            CaseResult r = run_case(point, setup, /*with_fd=*/false);
            rows[i] = r.row;
            rows[i].param = param_in_csv_units(cfg, values[i]);
            if (on_point) on_point(i, r);
        } catch (const std::exception& err) {
            rows[i].param = param_in_csv_units(cfg, values[i]);
            rows[i].failed = true;
            rows[i].error = err.what();
        }
    };

    workers = std::max(1, std::min<int>(workers, static_cast<int>(values.size())));
    if (workers == 1) {
        for (size_t i = 0; i < values.size(); ++i) eval_point(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < values.size(); i = next.fetch_add(1)) {
                    eval_point(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return rows;
}

std::vector<CheckOutcome> run_checks(const RunConfig& cfg,
                                     const std::function<void(const CheckOutcome&)>& emit) {
    std::vector<CheckOutcome> out;
    char buf[256];
    auto record = [&](const std::string& name, bool ok, const std::string& detail) {
        out.push_back({name, ok, detail});
        if (emit) emit(out.back());
    };

    // operator identities on random traces; the dot-product rule applies to
    // flux-like traces, so those are drawn normal-aligned
    {
        std::mt19937_64 rng(20230517);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        std::uniform_real_distribution<double> ang(0.0, 2.0 * 3.14159265358979323846);
        double worst = 0.0;
        for (int it = 0; it < 1000; ++it) {
            const double a = ang(rng);
            const Vec2 np{std::cos(a), std::sin(a)};
            const Vec2 nm{-np.x, -np.y};
            const double al_p = u(rng), al_m = u(rng);
            const Vec2 ap{u(rng), u(rng)}, am{u(rng), u(rng)};
            const ScalarTrace alpha{al_p, al_m, np, nm};
            const VectorTrace va{ap, am, np, nm};
            // scalar*vector identity
            const VectorTrace prod{al_p * ap, al_m * am, np, nm};
            const double lhs1 = jump_vector(prod);
            const double rhs1 = dot(jump_scalar(alpha), avg_vector(va)) +
                                avg_scalar(alpha) * jump_vector(va);
            // dot-product identity [[f.g]] = [[f]]<g> + <f>[[g]]
            const VectorTrace vf{u(rng) * np, u(rng) * np, np, nm};
            const VectorTrace vg{u(rng) * np, u(rng) * np, np, nm};
            const ScalarTrace dots{dot(vf.plus_value, vg.plus_value),
                                   dot(vf.minus_value, vg.minus_value), np, nm};
            const Vec2 lhs2 = jump_scalar(dots);
            const Vec2 rhs2 = jump_vector(vf) * avg_vector(vg) +
                              jump_vector(vg) * avg_vector(vf);
            worst = std::max(worst, std::abs(lhs1 - rhs1));
            worst = std::max(worst, norm(lhs2 - rhs2));
        }
        std::snprintf(buf, sizeof buf, "max identity residual %.3e", worst);
        record("jump-average identities", worst <= 1e-13, buf);
    }

    CaseSetup setup;
    try {
        setup = build_case(cfg);
    } catch (const std::exception& err) {
        record("geometry embedding", false, err.what());
        return out;
    }
    record("geometry embedding", true, "path embedded");

    const SolveOptions opts{cfg.solver_tolerance};
    const double meas = setup.mesh.total_area();
    const double power = total_power(setup.mesh, cfg.params);
    const double hss_mean = cfg.params.theta_amb + power / (cfg.params.h_T * meas);

    // HSS analytic value (uniform f)
    try {
        const auto hss = solve_hss(setup.mesh, cfg.params, opts);
        if (cfg.params.f.uniform()) {
            double dev = 0.0;
            for (double v : hss.values) dev = std::max(dev, std::abs(v - hss_mean));
            std::snprintf(buf, sizeof buf, "max nodal deviation %.3e K", dev);
            record("hot steady state analytic", dev <= 1e-6, buf);
        } else {
            const double mean = mean_surface_temperature(setup.mesh, hss.values);
            std::snprintf(buf, sizeof buf, "mean deviation %.3e K", std::abs(mean - hss_mean));
            record("hot steady state mean", std::abs(mean - hss_mean) <= 1e-8, buf);
        }
    } catch (const std::exception& err) {
        record("hot steady state analytic", false, err.what());
    }

    CaseResult res;
    try {
        res = run_case(cfg, setup, /*with_fd=*/true);
    } catch (const std::exception& err) {
        record("case solve", false, err.what());
        return out;
    }
    record("case solve", true, "forward and reverse solves converged");

    const double chi = heat_capacity_rate(cfg.params);

    {
        const double tol = 1e-8 * std::max(power, 1.0);
        std::snprintf(buf, sizeof buf, "residual %.3e W (inlet draw %.3e W)",
                      res.qoi.energy_balance_residual, res.qoi.inlet_power_W);
        record("energy balance identity",
               std::abs(res.qoi.energy_balance_residual) <= tol, buf);
        std::snprintf(buf, sizeof buf, "residual %.3e K", res.qoi.eq_hss_gap_residual);
        record("hss-gap identity", std::abs(res.qoi.eq_hss_gap_residual) <= 1e-8, buf);
    }

    if (chi > 0.0) {
        const double scale = std::max(res.qoi.mst - cfg.params.theta_amb, 1e-12);
        std::snprintf(buf, sizeof buf, "gap %.3e K (0.1%% bound %.3e K)",
                      res.qoi.invariance_gap, 1e-3 * scale);
        record("flow-reversal invariance", res.qoi.invariance_gap <= 1e-3 * scale, buf);
    }

    if (chi > 0.0 && cfg.params.f.uniform()) {
        std::snprintf(buf, sizeof buf, "DPhi[chi] = %.6e", res.sens.dphi_chi);
        record("heat-capacity-rate sensitivity sign", res.sens.dphi_chi <= 1e-9, buf);

        std::snprintf(buf, sizeof buf, "chi rel err %.3e, kappa rel err %.3e",
                      res.sens.rel_err_chi, res.sens.rel_err_kappa);
        record("adjoint vs finite-difference gradients",
               res.sens.rel_err_chi <= 1e-2 && res.sens.rel_err_kappa <= 1e-2, buf);

        // under-resolution guard: the continuum-form line integral drifts from
        // the discrete gradient when the channel neighborhood is too coarse
        const double consistency =
            std::abs(res.sens.dphi_chi - res.sens.fd_chi) /
            std::max(std::abs(res.sens.fd_chi), 1e-300);
        std::snprintf(buf, sizeof buf, "line-integral vs FD gap %.3f (bound 0.05)",
                      consistency);
        record("continuum-adjoint consistency", consistency <= 0.05, buf);
    }

    if (cfg.params.f.uniform()) {
        double lo = res.forward.values[0], hi = res.forward.values[0];
        for (const auto* field : {&res.forward, &res.reverse}) {
            for (double v : field->values) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        std::snprintf(buf, sizeof buf, "range [%.4f, %.4f] K vs [%.4f, %.4f] K",
                      lo, hi, cfg.params.theta_amb, hss_mean);
        record("nodal bounds", lo >= cfg.params.theta_amb - 1e-3 && hi <= hss_mean + 1e-3,
               buf);
        std::snprintf(buf, sizeof buf, "eta = %.6f", res.qoi.efficiency);
        record("efficiency range",
               res.qoi.efficiency >= -1e-3 && res.qoi.efficiency <= 1.0 + 1e-3, buf);
    }
    return out;
}

}  // namespace vtherm
