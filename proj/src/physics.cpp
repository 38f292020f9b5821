#include "vtherm/physics.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <unordered_map>

namespace vtherm {

void PhysicalParams::validate(const TriMesh* mesh) const {
    auto check_field = [&](const ElementField& f, const char* name, bool strictly_positive) {
        if (mesh && !f.uniform() && f.raw().size() != static_cast<size_t>(mesh->element_count())) {
            throw std::invalid_argument(std::string(name) +
                                        " field size must match the element count");
        }
        for (double v : f.raw()) {
            if (strictly_positive ? !(v > 0.0) : !(v >= 0.0)) {
                throw std::invalid_argument(std::string(name) +
                                            (strictly_positive ? " must be positive"
                                                               : " must be nonnegative"));
            }
        }
    };
    check_field(kappa, "kappa", true);
    check_field(f, "f", false);
    if (!(d > 0.0)) throw std::invalid_argument("d must be positive");
    if (!(h_T > 0.0)) throw std::invalid_argument("h_T must be positive");
    if (!(rho_f > 0.0)) throw std::invalid_argument("rho_f must be positive");
    if (!(c_f > 0.0)) throw std::invalid_argument("c_f must be positive");
    if (!(Q >= 0.0)) throw std::invalid_argument("Q must be nonnegative");
    if (!(theta_amb > 0.0)) throw std::invalid_argument("theta_amb must be positive");
}

double heat_capacity_rate(const PhysicalParams& params) {
    return params.rho_f * params.Q * params.c_f;
}

double total_power(const TriMesh& mesh, const PhysicalParams& params) {
    double s = 0.0;
    for (int e = 0; e < mesh.element_count(); ++e) {
        s += mesh.element_areas[e] * params.f.at(e);
    }
    return s;
}

AssembledSystem assemble(const TriMesh& mesh, const VasculaturePath* path,
                         const PhysicalParams& params, FlowDirection direction,
                         bool impose_inlet) {
    params.validate(&mesh);
    if (path) {
        for (const auto& e : path->edge_chain) {
            if (e[0] < 0 || e[0] >= mesh.node_count() || e[1] < 0 ||
                e[1] >= mesh.node_count() || !mesh.has_edge(e[0], e[1])) {
                throw std::invalid_argument("path does not conform to this mesh");
            }
        }
    }
    const int n = mesh.node_count();
    const double chi = direction == FlowDirection::hss ? 0.0 : heat_capacity_rate(params);

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(mesh.element_count()) * 9 +
                 (path ? path->edge_chain.size() * 4 : 0) + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

    for (int e = 0; e < mesh.element_count(); ++e) {
        const auto& el = mesh.elements[e];
        const double area = mesh.element_areas[e];
        const auto g = basis_gradients(mesh, e);
        const double dk = params.d * params.kappa.at(e);
        const double load = (params.f.at(e) + params.h_T * params.theta_amb) * area / 3.0;
        for (int a = 0; a < 3; ++a) {
            for (int c = 0; c < 3; ++c) {
                // exact P1 integrals: one-point conduction, consistent mass
                const double cond = dk * area * dot(g[a], g[c]);
                const double mass = params.h_T * area * (a == c ? 2.0 : 1.0) / 12.0;
                trip.emplace_back(el[a], el[c], cond + mass);
            }
            b[el[a]] += load;
        }
    }

    if (path && chi != 0.0) {
        // line advection: exact for P1, rows a and b both get chi/2*(th_b-th_a),
        // sign flipped under reverse flow
        const double sgn = direction == FlowDirection::reverse ? -1.0 : 1.0;
        for (const auto& e : path->edge_chain) {
            for (int r : {e[0], e[1]}) {
                trip.emplace_back(r, e[0], -sgn * chi / 2.0);
                trip.emplace_back(r, e[1], +sgn * chi / 2.0);
            }
        }
    }

    AssembledSystem sys;
    sys.constrained_node = -1;
    if (path && direction != FlowDirection::hss && impose_inlet) {
        sys.constrained_node =
            direction == FlowDirection::forward ? path->inlet_node() : path->outlet_node();
        sys.constrained_value = params.theta_amb;

        std::unordered_map<int, double> row;
        std::vector<Eigen::Triplet<double>> kept;
        kept.reserve(trip.size());
        for (const auto& t : trip) {
            if (t.row() == sys.constrained_node) {
                row[t.col()] += t.value();
            } else {
                kept.push_back(t);
            }
        }
        sys.replaced_row.assign(row.begin(), row.end());
        std::sort(sys.replaced_row.begin(), sys.replaced_row.end());
        sys.replaced_rhs = b[sys.constrained_node];
        kept.emplace_back(sys.constrained_node, sys.constrained_node, 1.0);
        b[sys.constrained_node] = params.theta_amb;
        trip = std::move(kept);
    }

    sys.A.resize(n, n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    sys.b = std::move(b);
    return sys;
}

TemperatureField solve_system(const AssembledSystem& sys, FlowDirection direction,
                              double chi, SolveOptions opts) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(sys.A);
    lu.factorize(sys.A);
    if (lu.info() != Eigen::Success) {
        throw SolveError("sparse factorization failed: " + lu.lastErrorMessage());
    }
    Eigen::VectorXd x = lu.solve(sys.b);
    const double rel_res = (sys.A * x - sys.b).norm() / sys.b.norm();
    if (!(rel_res <= opts.tolerance) || !x.allFinite()) {
        throw SolveError("linear solve missed the residual contract: relative residual " +
                         std::to_string(rel_res));
    }

    TemperatureField field;
    field.direction = direction;
    field.chi_used = chi;
    field.residual_norm = rel_res;
    field.constrained_node = sys.constrained_node;
    if (sys.constrained_node >= 0) {
        x[sys.constrained_node] = sys.constrained_value;  // pin exactly
        double flux = 0.0;
        for (const auto& [col, coeff] : sys.replaced_row) {
            flux += coeff * x[col];
        }
        field.inlet_power_W = sys.replaced_rhs - flux;
    }
    field.values.assign(x.data(), x.data() + x.size());
    return field;
}

TemperatureField solve_direct(const TriMesh& mesh, const VasculaturePath& path,
                              const PhysicalParams& params, SolveOptions opts) {
    const auto sys = assemble(mesh, &path, params, FlowDirection::forward);
    return solve_system(sys, FlowDirection::forward, heat_capacity_rate(params), opts);
}

TemperatureField solve_reverse(const TriMesh& mesh, const VasculaturePath& path,
                               const PhysicalParams& params, SolveOptions opts) {
    const auto sys = assemble(mesh, &path, params, FlowDirection::reverse);
    return solve_system(sys, FlowDirection::reverse, heat_capacity_rate(params), opts);
}

TemperatureField solve_hss(const TriMesh& mesh, const PhysicalParams& params,
                           SolveOptions opts) {
    const auto sys = assemble(mesh, nullptr, params, FlowDirection::hss);
    return solve_system(sys, FlowDirection::hss, 0.0, opts);
}

}  // namespace vtherm
