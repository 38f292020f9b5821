#include "vtherm/sensitivity.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace vtherm {

namespace {

void require_uniform_f(const PhysicalParams& params) {
    if (!params.f.uniform() || !(params.f.uniform_value() > 0.0)) {
        throw std::invalid_argument(
            "the compact sensitivity expressions hold for uniform positive f only");
    }
}

void require_same_mesh(const TriMesh& mesh, const TemperatureField& a,
                       const TemperatureField& b) {
    if (a.values.size() != mesh.nodes.size() || b.values.size() != mesh.nodes.size()) {
        throw std::invalid_argument("temperature fields do not match the mesh");
    }
}

}  // namespace

HeatFluxField heat_flux(const TriMesh& mesh, const PhysicalParams& params,
                        const TemperatureField& field) {
    HeatFluxField out;
    out.direction = field.direction;
    out.q.resize(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        out.q[e] = -params.kappa.at(e) * element_gradient(mesh, field.values, e);
    }
    return out;
}

double sensitivity_chi(const VasculaturePath& path, const TemperatureField& forward,
                       const TemperatureField& reverse, const PhysicalParams& params) {
    require_uniform_f(params);
    if (forward.values.size() != reverse.values.size()) {
        throw std::invalid_argument("forward and reverse fields live on different meshes");
    }
    for (int v : path.node_sequence) {
        if (v < 0 || static_cast<size_t>(v) >= forward.values.size()) {
            throw std::invalid_argument("path does not match the fields' mesh");
        }
    }
    const double f0 = params.f.uniform_value();
    double acc = 0.0;
    for (const auto& e : path.edge_chain) {
        // d(theta_f)/ds integrated over the edge is just the nodal difference;
        // theta_r enters at the edge midpoint via the trapezoid average.
        const double mid_r =
            0.5 * (reverse.values[e[0]] + reverse.values[e[1]]) - params.theta_amb;
        acc += mid_r * (forward.values[e[1]] - forward.values[e[0]]);
    }
    return -acc / f0;
}

KappaSensitivity sensitivity_kappa(const TriMesh& mesh, const TemperatureField& forward,
                                   const TemperatureField& reverse,
                                   const PhysicalParams& params) {
    require_uniform_f(params);
    require_same_mesh(mesh, forward, reverse);
    const double f0 = params.f.uniform_value();
    KappaSensitivity out;
    out.per_element.resize(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        const Vec2 gf = element_gradient(mesh, forward.values, e);
        const Vec2 gr = element_gradient(mesh, reverse.values, e);
        out.per_element[e] = -(params.d / f0) * mesh.element_areas[e] * dot(gf, gr);
        out.uniform_total += out.per_element[e];
    }
    return out;
}

double flux_form_integral(const TriMesh& mesh, const PhysicalParams& params,
                          const HeatFluxField& qf, const HeatFluxField& qr) {
    double acc = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        const double k = params.kappa.at(e);
        acc += params.d / (k * k) * mesh.element_areas[e] * dot(qf.q[e], qr.q[e]);
    }
    return acc;
}

DiscreteGradients discrete_gradients(const TriMesh& mesh, const VasculaturePath& path,
                                     const PhysicalParams& params, SolveOptions opts) {
    require_uniform_f(params);
    const auto sys = assemble(mesh, &path, params, FlowDirection::forward);

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) {
        throw SolveError("sparse factorization failed: " + lu.lastErrorMessage());
    }
    const Eigen::VectorXd theta = lu.solve(sys.b);

    // dPhi/dtheta: P1 integral weights
    Eigen::VectorXd m = Eigen::VectorXd::Zero(mesh.node_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        for (int a : mesh.elements[e]) {
            m[a] += mesh.element_areas[e] / 3.0;
        }
    }
    const Eigen::VectorXd mu = lu.transpose().solve(m);
    const double rel = (sys.A.transpose() * mu - m).norm() / m.norm();
    if (!(rel <= opts.tolerance)) {
        throw SolveError("adjoint transpose solve missed the residual contract");
    }

    DiscreteGradients out;
    out.adjoint.assign(mu.data(), mu.data() + mu.size());
    const int pinned = sys.constrained_node;

    // dA/dchi action on theta, skipping the replaced row
    for (const auto& e : path.edge_chain) {
        const double val = 0.5 * (theta[e[1]] - theta[e[0]]);
        for (int r : {e[0], e[1]}) {
            if (r != pinned) out.dphi_chi -= mu[r] * val;
        }
    }

    // dA/dkappa_e action on theta: thickness-scaled element stiffness
    out.dphi_kappa.resize(mesh.element_count());
    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const auto g = basis_gradients(mesh, e);
        const double da = params.d * mesh.element_areas[e];
        double acc = 0.0;
        for (int a = 0; a < 3; ++a) {
            if (el[a] == pinned) continue;
            double row = 0.0;
            for (int c = 0; c < 3; ++c) {
                row += dot(g[a], g[c]) * theta[el[c]];
            }
            acc += mu[el[a]] * row;
        }
        out.dphi_kappa[e] = -da * acc;
        out.dphi_kappa_uniform += out.dphi_kappa[e];
    }
    return out;
}

double fd_oracle(const TriMesh& mesh, const VasculaturePath& path,
                 const PhysicalParams& params, FdTarget target, int element,
                 double rel_step, SolveOptions opts) {
    if (!(rel_step >= 1e-6 && rel_step <= 1e-1)) {
        throw std::invalid_argument("rel_step must lie in [1e-6, 1e-1]");
    }
    auto phi_of = [&](const PhysicalParams& p) {
        const auto field = solve_direct(mesh, path, p, opts);
        return field_integral(mesh, field.values);
    };
    PhysicalParams lo = params, hi = params;
    double step = 0.0;
    switch (target) {
        case FdTarget::chi: {
            // chi = rho_f*Q*c_f is perturbed through Q
            if (!(heat_capacity_rate(params) > 0.0)) {
                throw std::invalid_argument("fd target chi needs chi > 0");
            }
            const double dq = rel_step * params.Q;
            lo.Q = params.Q - dq;
            hi.Q = params.Q + dq;
            step = heat_capacity_rate(hi) - heat_capacity_rate(params);
            break;
        }
        case FdTarget::kappa_uniform: {
            if (!params.kappa.uniform()) {
                throw std::invalid_argument("fd target kappa_uniform needs uniform kappa");
            }
            const double k = params.kappa.uniform_value();
            step = rel_step * k;
            lo.kappa = ElementField(k - step);
            hi.kappa = ElementField(k + step);
            break;
        }
        case FdTarget::kappa_element: {
            if (element < 0 || element >= mesh.element_count()) {
                throw std::out_of_range("fd target element out of range");
            }
            std::vector<double> base;
            if (params.kappa.uniform()) {
                base.assign(mesh.element_count(), params.kappa.uniform_value());
            } else {
                base = params.kappa.raw();
            }
            step = rel_step * base[element];
            auto lo_v = base, hi_v = base;
            lo_v[element] -= step;
            hi_v[element] += step;
            lo.kappa = ElementField::per_element(std::move(lo_v));
            hi.kappa = ElementField::per_element(std::move(hi_v));
            break;
        }
    }
    return (phi_of(hi) - phi_of(lo)) / (2.0 * step);
}

SensitivityReport sensitivity_report(const TriMesh& mesh, const VasculaturePath& path,
                                     const PhysicalParams& params,
                                     const TemperatureField& forward,
                                     const TemperatureField& reverse, bool with_fd,
                                     SolveOptions opts) {
    SensitivityReport r;
    r.dphi_chi = sensitivity_chi(path, forward, reverse, params);
    auto ks = sensitivity_kappa(mesh, forward, reverse, params);
    r.dphi_kappa_field = std::move(ks.per_element);
    r.dphi_kappa_uniform = ks.uniform_total;

    const auto dg = discrete_gradients(mesh, path, params, opts);
    r.dphi_chi_discrete = dg.dphi_chi;
    r.dphi_kappa_uniform_discrete = dg.dphi_kappa_uniform;

    const double meas = mesh.total_area();
    r.dmst_chi = r.dphi_chi / meas;
    r.dmst_kappa_uniform = r.dphi_kappa_uniform / meas;

    if (with_fd) {
        r.fd_chi = fd_oracle(mesh, path, params, FdTarget::chi, -1, 1e-3, opts);
        r.fd_kappa_uniform =
            fd_oracle(mesh, path, params, FdTarget::kappa_uniform, -1, 1e-3, opts);
        r.rel_err_chi = std::abs(r.dphi_chi_discrete - r.fd_chi) /
                        std::max(std::abs(r.fd_chi), 1e-300);
        r.rel_err_kappa = std::abs(r.dphi_kappa_uniform_discrete - r.fd_kappa_uniform) /
                          std::max(std::abs(r.fd_kappa_uniform), 1e-300);
    }
    return r;
}

}  // namespace vtherm
