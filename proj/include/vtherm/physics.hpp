// Galerkin assembly and steady solves for the reduced-order thermal model:
// in-plane conduction through the plate thickness, surface exchange with the
// ambient, and a one-dimensional advective line term along the embedded
// channel with the inlet temperature pinned at a single node.
#pragma once

#include <Eigen/Sparse>
#include <optional>
#include <utility>
#include <vector>

#include "vtherm/geometry.hpp"
#include "vtherm/vasculature.hpp"

namespace vtherm {

class SolveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Scalar coefficient field, either uniform or one value per element.
class ElementField {
  public:
    ElementField() : values_{0.0} {}
    ElementField(double uniform) : values_{uniform} {}  // NOLINT: implicit by design
    static ElementField per_element(std::vector<double> v) {
        ElementField f;
        f.values_ = std::move(v);
        return f;
    }
    bool uniform() const { return values_.size() == 1; }
    double uniform_value() const { return values_[0]; }
    double at(size_t e) const { return values_.size() == 1 ? values_[0] : values_[e]; }
    std::vector<double>& raw() { return values_; }
    const std::vector<double>& raw() const { return values_; }

  private:
    std::vector<double> values_;
};

struct PhysicalParams {
    ElementField kappa = 3.2110;  // host conductivity, W/m/K
    double d = 0.005;             // plate thickness, m
    double h_T = 21.0;            // combined heat transfer coefficient, W/m^2/K
    double theta_amb = 295.15;    // ambient temperature, K
    ElementField f = 1000.0;      // heater power, W/m^2
    double rho_f = 1000.0;        // coolant density, kg/m^3
    double c_f = 4183.0;          // coolant specific heat, J/kg/K
    double Q = 0.0;               // volumetric flow rate, m^3/s

    void validate(const TriMesh* mesh = nullptr) const;
};

// chi = rho_f * Q * c_f
double heat_capacity_rate(const PhysicalParams& params);

// Integral of the heater power over the plate, W.
double total_power(const TriMesh& mesh, const PhysicalParams& params);

enum class FlowDirection { forward, reverse, hss };

struct TemperatureField {
    std::vector<double> values;  // K, per node
    FlowDirection direction = FlowDirection::forward;
    double residual_norm = 0.0;  // relative linear residual of the solve
    double chi_used = 0.0;       // W/K
    int constrained_node = -1;   // -1 when no inlet pin (HSS)
    // Heat drawn by the pinned inlet node, W: the reaction of the replaced
    // equation. Enters the discrete energy balance alongside chi*(out-in).
    double inlet_power_W = 0.0;
};

struct AssembledSystem {
    Eigen::SparseMatrix<double> A;
    Eigen::VectorXd b;
    int constrained_node = -1;
    double constrained_value = 0.0;
    // original (pre-replacement) coefficients and rhs of the constrained row
    std::vector<std::pair<int, double>> replaced_row;
    double replaced_rhs = 0.0;
};

// Assemble the Galerkin system. `path` may be null (no channel, no pin). The
// line term enters with the stored tangents for forward flow and negated for
// reverse; the inlet pin sits at s=0 (forward) or s=1 (reverse) and is imposed
// by row replacement when `impose_inlet` is set.
AssembledSystem assemble(const TriMesh& mesh, const VasculaturePath* path,
                         const PhysicalParams& params, FlowDirection direction,
                         bool impose_inlet = true);

struct SolveOptions {
    double tolerance = 1e-10;  // relative residual contract
};

TemperatureField solve_direct(const TriMesh& mesh, const VasculaturePath& path,
                              const PhysicalParams& params, SolveOptions opts = {});
TemperatureField solve_reverse(const TriMesh& mesh, const VasculaturePath& path,
                               const PhysicalParams& params, SolveOptions opts = {});
// chi = 0 and no inlet pin; for uniform f the field is uniform
// theta_amb + f0/h_T.
TemperatureField solve_hss(const TriMesh& mesh, const PhysicalParams& params,
                           SolveOptions opts = {});

// Solve an already assembled system (shared by the solver entry points and
// the sensitivity module's re-solves).
TemperatureField solve_system(const AssembledSystem& sys, FlowDirection direction,
                              double chi, SolveOptions opts);

}  // namespace vtherm
