// vtherm command line: run a configured case, sweep a parameter, run the
// bundled invariant checks, or inspect a mesh file.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "vtherm/run.hpp"

namespace fs = std::filesystem;
using namespace vtherm;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_report(const RunConfig& cfg, const CaseResult& res) {
    const double chi = heat_capacity_rate(cfg.params);
    std::printf("chi                  %.8e W/K\n", chi);
    std::printf("MST                  %.6f K\n", res.qoi.mst);
    std::printf("theta_outlet         %.6f K\n", res.qoi.theta_outlet);
    std::printf("theta_inlet          %.6f K\n", res.qoi.theta_inlet);
    std::printf("efficiency           %.6f\n", res.qoi.efficiency);
    std::printf("hss_mean             %.6f K\n", res.qoi.hss_mean);
    std::printf("hss_gap              %.6f K\n", res.qoi.hss_gap);
    std::printf("invariance_gap       %.3e K\n", res.qoi.invariance_gap);
    std::printf("energy_residual      %.3e W\n", res.qoi.energy_balance_residual);
    std::printf("hss_gap_residual     %.3e K\n", res.qoi.eq_hss_gap_residual);
    std::printf("inlet_power          %.6e W\n", res.qoi.inlet_power_W);
    std::printf("DPhi[chi]            %.8e m^2K/(W/K)   (discrete %.8e)\n",
                res.sens.dphi_chi, res.sens.dphi_chi_discrete);
    std::printf("DPhi[kappa] uniform  %.8e m^2K/(W/m/K) (discrete %.8e)\n",
                res.sens.dphi_kappa_uniform, res.sens.dphi_kappa_uniform_discrete);
    std::printf("DMST[chi]            %.8e K/(W/K)\n", res.sens.dmst_chi);
    std::printf("DMST[kappa] uniform  %.8e K/(W/m/K)\n", res.sens.dmst_kappa_uniform);
    if (cfg.fd_check && chi > 0.0) {
        std::printf("fd chi               %.8e (rel err %.3e)\n", res.sens.fd_chi,
                    res.sens.rel_err_chi);
        std::printf("fd kappa uniform     %.8e (rel err %.3e)\n", res.sens.fd_kappa_uniform,
                    res.sens.rel_err_kappa);
    }
}

void write_case_outputs(const RunConfig& cfg, const CaseSetup& setup, const CaseResult& res,
                        const fs::path& out_dir, bool vtk, bool profile) {
    fs::create_directories(out_dir);
    if (cfg.outputs.csv) {
        write_file((out_dir / "case.csv").string(), sweep_csv({res.row}));
    }
    if (vtk || cfg.outputs.vtk) {
        VtkFields fields;
        fields.point_scalars.emplace_back("temperature_K", res.forward.values);
        fields.point_scalars.emplace_back("temperature_reverse_K", res.reverse.values);
        const auto qf = heat_flux(setup.mesh, cfg.params, res.forward);
        const auto qr = heat_flux(setup.mesh, cfg.params, res.reverse);
        fields.cell_vectors.emplace_back("heat_flux_W_per_m2", qf.q);
        fields.cell_vectors.emplace_back("heat_flux_reverse_W_per_m2", qr.q);
        fields.cell_scalars.emplace_back("dphi_kappa", res.sens.dphi_kappa_field);
        write_file((out_dir / "fields.vtk").string(), vtk_unstructured(setup.mesh, fields));
    }
    if (profile || cfg.outputs.profile) {
        write_file((out_dir / "profile.csv").string(),
                   profile_csv(profile_along(setup.path, res.forward.values)));
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"thermal regulation in thin vascular plates: solver, QoIs and "
                 "design sensitivities"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    int workers = 1;
    bool vtk = false;
    bool profile = false;
    bool check_flag = false;

    auto add_common = [&](CLI::App* sub, bool with_config = true) {
        if (with_config) {
            sub->add_option("config", config_path, "configuration file")->required();
        }
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--workers", workers, "concurrent sweep workers");
        sub->add_flag("--vtk", vtk, "write VTK field exports");
        sub->add_flag("--profile", profile, "write theta-along-channel CSV");
    };

    auto* cmd_run = app.add_subcommand("run", "solve one configured case");
    add_common(cmd_run);
    cmd_run->add_flag("--check", check_flag, "also run the invariant suite; "
                                             "nonzero exit on any failure");

    auto* cmd_sweep = app.add_subcommand("sweep", "sweep Q or kappa and write CSV");
    add_common(cmd_sweep);

    auto* cmd_check = app.add_subcommand("check", "run the bundled invariant suite");
    add_common(cmd_check);

    auto* cmd_info = app.add_subcommand("mesh-info", "print mesh file statistics");
    std::string mesh_path;
    cmd_info->add_option("meshfile", mesh_path, "vtmesh file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_info->parsed()) {
            const TriMesh mesh = load_mesh(slurp(mesh_path));
            std::printf("nodes      %d\n", mesh.node_count());
            std::printf("elements   %d\n", mesh.element_count());
            std::printf("boundary   %zu\n", mesh.boundary_edges.size());
            std::printf("extent     %.6g x %.6g m\n", mesh.width, mesh.height);
            std::printf("total area %.12g m^2\n", mesh.total_area());
            return 0;
        }

        const RunConfig cfg = parse_config(slurp(config_path));

        if (cmd_check->parsed()) {
            int failures = 0;
            run_checks(cfg, [&](const CheckOutcome& c) {
                std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                            c.detail.c_str());
                failures += c.passed ? 0 : 1;
            });
            std::printf("%d check(s) failed\n", failures);
            return failures == 0 ? 0 : 1;
        }

        if (cmd_run->parsed()) {
            const CaseSetup setup = build_case(cfg);
            const CaseResult res = run_case(cfg, setup, cfg.fd_check);
            print_report(cfg, res);
            write_case_outputs(cfg, setup, res, out_dir, vtk, profile);
            if (check_flag) {
                int failures = 0;
                run_checks(cfg, [&](const CheckOutcome& c) {
                    std::printf("%s %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(),
                                c.detail.c_str());
                    failures += c.passed ? 0 : 1;
                });
                if (failures > 0) {
                    std::printf("%d check(s) failed\n", failures);
                    return 1;
                }
            }
            return 0;
        }

        if (cmd_sweep->parsed()) {
            const CaseSetup setup = build_case(cfg);
            fs::create_directories(out_dir);
            const bool want_vtk = vtk || cfg.outputs.vtk;
            const bool want_profile = profile || cfg.outputs.profile;
            std::mutex io_mutex;
            std::function<void(size_t, const CaseResult&)> exporter;
            if (want_vtk || want_profile) {
                exporter = [&](size_t i, const CaseResult& res) {
                    char tag[48];
                    std::snprintf(tag, sizeof tag, "%c%g",
                                  cfg.sweep->parameter == SweepParameter::Q ? 'q' : 'k',
                                  res.row.param);
                    std::lock_guard<std::mutex> lock(io_mutex);
                    (void)i;
                    if (want_vtk) {
                        VtkFields fields;
                        fields.point_scalars.emplace_back("temperature_K",
                                                          res.forward.values);
                        fields.point_scalars.emplace_back("temperature_reverse_K",
                                                          res.reverse.values);
                        const auto qf = heat_flux(setup.mesh, res.params_used, res.forward);
                        const auto qr = heat_flux(setup.mesh, res.params_used, res.reverse);
                        fields.cell_vectors.emplace_back("heat_flux_W_per_m2", qf.q);
                        fields.cell_vectors.emplace_back("heat_flux_reverse_W_per_m2",
                                                         qr.q);
                        if (!res.sens.dphi_kappa_field.empty()) {
                            fields.cell_scalars.emplace_back("dphi_kappa",
                                                             res.sens.dphi_kappa_field);
                        }
                        write_file(
                            (fs::path(out_dir) / ("fields_" + std::string(tag) + ".vtk"))
                                .string(),
                            vtk_unstructured(setup.mesh, fields));
                    }
                    if (want_profile) {
                        write_file(
                            (fs::path(out_dir) / ("profile_" + std::string(tag) + ".csv"))
                                .string(),
                            profile_csv(profile_along(setup.path, res.forward.values)));
                    }
                };
            }
            const auto rows = run_sweep(cfg, setup, workers, exporter);
            const std::string csv = sweep_csv(rows);
            write_file((fs::path(out_dir) / "sweep.csv").string(), csv);
            std::fputs(csv.c_str(), stdout);
            for (const auto& r : rows) {
                if (r.failed) {
                    std::fprintf(stderr, "point %g failed: %s\n", r.param, r.error.c_str());
                }
            }
            return 0;
        }
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
    return 0;
}
