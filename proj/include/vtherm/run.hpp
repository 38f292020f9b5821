// Case and sweep orchestration on top of the solver/qoi/sensitivity modules.
#pragma once

#include <functional>
#include <optional>

#include "vtherm/config.hpp"
#include "vtherm/io.hpp"
#include "vtherm/qoi.hpp"
#include "vtherm/sensitivity.hpp"

namespace vtherm {

struct CaseResult {
    QoiReport qoi;
    SensitivityReport sens;
    TemperatureField forward;
    TemperatureField reverse;   // equals forward for chi = 0 (no-flow problem)
    SweepRow row;               // the CSV row for this case
    PhysicalParams params_used; // parameters of this evaluation (sweeps vary them)
};

struct CaseSetup {
    TriMesh mesh;
    VasculaturePath path;
};

CaseSetup build_case(const RunConfig& cfg);

// One full evaluation at the configured parameters: forward + reverse solves,
// identity diagnostics, invariance gap, sensitivities (FD oracles when
// `with_fd`). chi = 0 degenerates to the no-flow problem.
CaseResult run_case(const RunConfig& cfg, const CaseSetup& setup, bool with_fd);

// One row per sweep value, ordered by value; failures are recorded per row
// and do not abort the sweep. `workers` > 1 evaluates points concurrently.
// `on_point` receives each successful point's full result (index into the
// sweep values); with workers > 1 it may be invoked from worker threads.
std::vector<SweepRow> run_sweep(const RunConfig& cfg, const CaseSetup& setup,
                                int workers = 1,
                                const std::function<void(size_t, const CaseResult&)>&
                                    on_point = {});

struct CheckOutcome {
    std::string name;
    bool passed = false;
    std::string detail;
};

// The bundled invariant suite: operator identities, HSS analytic value,
// energy identities, flow-reversal invariance, sensitivity sign, FD gradient
// agreement, nodal bounds, efficiency range.
std::vector<CheckOutcome> run_checks(const RunConfig& cfg,
                                     const std::function<void(const CheckOutcome&)>& emit = {});

}  // namespace vtherm
