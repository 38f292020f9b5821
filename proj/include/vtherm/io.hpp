// File outputs: sweep/case CSV, temperature profiles along the channel, and
// legacy-ASCII VTK unstructured-grid exports.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "vtherm/geometry.hpp"

namespace vtherm {

inline constexpr const char* kSweepCsvHeader =
    "param,mst_K,theta_out_K,eta,dphi_chi,dphi_kappa,inv_gap_K,energy_res_W";

struct SweepRow {
    double param = 0.0;       // sweep value (mL/min for Q, W/m/K for kappa)
    double mst = 0.0;         // K
    double theta_out = 0.0;   // K
    double eta = 0.0;
    double dphi_chi = 0.0;
    double dphi_kappa = 0.0;  // uniform total
    double inv_gap = 0.0;     // K
    double energy_res = 0.0;  // W
    bool failed = false;
    std::string error;
};

// Fixed-header CSV; failed rows carry the literal 'failed' in every data
// column. Deterministic formatting.
std::string sweep_csv(const std::vector<SweepRow>& rows);

std::string profile_csv(const std::vector<std::pair<double, double>>& profile);

// Point data: named nodal scalars. Cell data: named per-element scalars and
// per-element 2-vectors (written with a zero z-component).
struct VtkFields {
    std::vector<std::pair<std::string, std::vector<double>>> point_scalars;
    std::vector<std::pair<std::string, std::vector<double>>> cell_scalars;
    std::vector<std::pair<std::string, std::vector<Vec2>>> cell_vectors;
};

std::string vtk_unstructured(const TriMesh& mesh, const VtkFields& fields);

void write_file(const std::string& path, const std::string& content);

}  // namespace vtherm
