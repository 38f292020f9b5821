// Design sensitivities of Phi = int(theta) dOmega to the heat-capacity rate
// and to the per-element conductivity field.
//
// Two routes are provided:
//  * the compact adjoint expressions evaluated with the forward and
//    reverse-flow fields (the reverse solution is the adjoint state) -- the
//    line integral along the channel for chi and the per-element gradient
//    product for kappa;
//  * the gradient of the assembled discrete system, obtained from one
//    transpose solve of the factorized forward operator. This one matches
//    central finite differences of the discrete objective to solver
//    precision at any resolution, and is what the FD gate checks.
#pragma once

#include "vtherm/qoi.hpp"

namespace vtherm {

struct HeatFluxField {
    std::vector<Vec2> q;  // per element, W/m^2
    FlowDirection direction = FlowDirection::forward;
};

// q = -kappa * grad(theta), per element.
HeatFluxField heat_flux(const TriMesh& mesh, const PhysicalParams& params,
                        const TemperatureField& field);

// D Phi[chi] as the channel line integral
//   -(1/f0) int_Sigma (theta_r - theta_amb) d(theta_f)/ds dGamma,
// quadrature per edge: difference quotient for the tangential derivative,
// trapezoid midpoint for theta_r. Requires uniform f with f0 > 0.
double sensitivity_chi(const VasculaturePath& path, const TemperatureField& forward,
                       const TemperatureField& reverse, const PhysicalParams& params);

struct KappaSensitivity {
    std::vector<double> per_element;  // -(d/f0) * area_e * grad(theta_r).grad(theta_f)
    double uniform_total = 0.0;       // sum over elements
};

// D Phi[kappa(x)] restricted to each element (gradient form of the compact
// expression). The flux form -(1/f0) int (d/kappa^2) q_r.q_f dOmega is the
// same number rewritten; heat_flux + flux_form_integral reproduce it.
KappaSensitivity sensitivity_kappa(const TriMesh& mesh, const TemperatureField& forward,
                                   const TemperatureField& reverse,
                                   const PhysicalParams& params);

// int (d/kappa^2) q_r.q_f dOmega evaluated from the two flux fields; equals
// -f0 times the uniform kappa sensitivity, element by element.
double flux_form_integral(const TriMesh& mesh, const PhysicalParams& params,
                          const HeatFluxField& qf, const HeatFluxField& qr);

// Gradients of the assembled discrete system (FD-grade). `adjoint` is the
// discrete adjoint variable; f0*adjoint + theta_amb converges to the
// reverse-flow temperature field.
struct DiscreteGradients {
    double dphi_chi = 0.0;
    std::vector<double> dphi_kappa;  // per element
    double dphi_kappa_uniform = 0.0;
    std::vector<double> adjoint;     // per node
};
DiscreteGradients discrete_gradients(const TriMesh& mesh, const VasculaturePath& path,
                                     const PhysicalParams& params, SolveOptions opts = {});

enum class FdTarget { chi, kappa_uniform, kappa_element };

// Central difference of Phi under a symmetric relative perturbation of the
// target, re-solving the direct problem twice.
double fd_oracle(const TriMesh& mesh, const VasculaturePath& path,
                 const PhysicalParams& params, FdTarget target, int element = -1,
                 double rel_step = 1e-3, SolveOptions opts = {});

struct SensitivityReport {
    // compact adjoint expressions (forward + reverse fields)
    double dphi_chi = 0.0;
    std::vector<double> dphi_kappa_field;
    double dphi_kappa_uniform = 0.0;
    // discrete-system gradients
    double dphi_chi_discrete = 0.0;
    double dphi_kappa_uniform_discrete = 0.0;
    // finite-difference oracle values and discrepancies vs the discrete route
    double fd_chi = 0.0;
    double fd_kappa_uniform = 0.0;
    double rel_err_chi = 0.0;
    double rel_err_kappa = 0.0;
    // MST sensitivities (Phi scaled by 1/meas) for convenience
    double dmst_chi = 0.0;
    double dmst_kappa_uniform = 0.0;
};

SensitivityReport sensitivity_report(const TriMesh& mesh, const VasculaturePath& path,
                                     const PhysicalParams& params,
                                     const TemperatureField& forward,
                                     const TemperatureField& reverse, bool with_fd,
                                     SolveOptions opts = {});

}  // namespace vtherm
