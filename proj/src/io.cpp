#include "vtherm/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace vtherm {

namespace {

void append_num(std::string& out, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    out += buf;
}

}  // namespace

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        append_num(out, r.param);
        if (r.failed) {
            for (int i = 0; i < 7; ++i) out += ",failed";
            out += '\n';
            continue;
        }
        const double cols[] = {r.mst,      r.theta_out, r.eta,       r.dphi_chi,
                               r.dphi_kappa, r.inv_gap,   r.energy_res};
        for (double c : cols) {
            out += ',';
            append_num(out, c);
        }
        out += '\n';
    }
    return out;
}

std::string profile_csv(const std::vector<std::pair<double, double>>& profile) {
    std::string out = "s,theta_K\n";
    for (const auto& [s, v] : profile) {
        append_num(out, s);
        out += ',';
        append_num(out, v);
        out += '\n';
    }
    return out;
}

std::string vtk_unstructured(const TriMesh& mesh, const VtkFields& fields) {
    for (const auto& [name, v] : fields.point_scalars) {
        if (v.size() != mesh.nodes.size()) {
            throw std::invalid_argument("point field '" + name + "' does not match the mesh");
        }
    }
    for (const auto& [name, v] : fields.cell_scalars) {
        if (v.size() != mesh.elements.size()) {
            throw std::invalid_argument("cell field '" + name + "' does not match the mesh");
        }
    }
    for (const auto& [name, v] : fields.cell_vectors) {
        if (v.size() != mesh.elements.size()) {
            throw std::invalid_argument("cell field '" + name + "' does not match the mesh");
        }
    }

    std::string out;
    out.reserve(mesh.nodes.size() * 60 + mesh.elements.size() * 30);
    char buf[160];
    out += "# vtk DataFile Version 3.0\n";
    out += "vtherm fields\n";
    out += "ASCII\n";
    out += "DATASET UNSTRUCTURED_GRID\n";
    std::snprintf(buf, sizeof buf, "POINTS %d double\n", mesh.node_count());
    out += buf;
    for (const Vec2& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", p.x, p.y);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "CELLS %d %d\n", mesh.element_count(),
                  4 * mesh.element_count());
    out += buf;
    for (const auto& e : mesh.elements) {
        std::snprintf(buf, sizeof buf, "3 %d %d %d\n", e[0], e[1], e[2]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "CELL_TYPES %d\n", mesh.element_count());
    out += buf;
    for (int e = 0; e < mesh.element_count(); ++e) out += "5\n";

    if (!fields.point_scalars.empty()) {
        std::snprintf(buf, sizeof buf, "POINT_DATA %d\n", mesh.node_count());
        out += buf;
        for (const auto& [name, v] : fields.point_scalars) {
            out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
            for (double x : v) {
                std::snprintf(buf, sizeof buf, "%.12g\n", x);
                out += buf;
            }
        }
    }
    if (!fields.cell_scalars.empty() || !fields.cell_vectors.empty()) {
        std::snprintf(buf, sizeof buf, "CELL_DATA %d\n", mesh.element_count());
        out += buf;
        for (const auto& [name, v] : fields.cell_scalars) {
            out += "SCALARS " + name + " double 1\nLOOKUP_TABLE default\n";
            for (double x : v) {
                std::snprintf(buf, sizeof buf, "%.12g\n", x);
                out += buf;
            }
        }
        for (const auto& [name, v] : fields.cell_vectors) {
            out += "VECTORS " + name + " double\n";
            for (const Vec2& x : v) {
                std::snprintf(buf, sizeof buf, "%.12g %.12g 0\n", x.x, x.y);
                out += buf;
            }
        }
    }
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << content;
    if (!out) {
        throw std::runtime_error("write failed for '" + path + "'");
    }
}

}  // namespace vtherm
