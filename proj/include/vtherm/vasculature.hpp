// Embedding of the coolant channel as a chain of mesh edges, arc-length
// parameterization, and the built-in channel layouts (straight, U-shape,
// serpentine).
#pragma once

#include <span>
#include <utility>
#include <vector>

#include "vtherm/geometry.hpp"

namespace vtherm {

class EmbeddingError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct VasculaturePath {
    std::vector<int> node_sequence;              // inlet .. outlet
    std::vector<Vec2> points;                    // coordinates per chain node
    std::vector<std::array<int, 2>> edge_chain;  // oriented with increasing s
    std::vector<double> s_values;                // per node, 0 at inlet, 1 at outlet
    std::vector<Vec2> tangents;                  // per edge, unit, along s
    double total_length = 0.0;                   // m

    int inlet_node() const { return node_sequence.front(); }
    int outlet_node() const { return node_sequence.back(); }
    int edge_count() const { return static_cast<int>(edge_chain.size()); }
};

enum class VascularKind { straight, u_shape, serpentine, polyline };

struct VascularCase {
    VascularKind kind = VascularKind::straight;
    double spacing_l = 0.02;      // m, U-shape leg spacing
    double leg_top_y = -1.0;      // m; <0 means top boundary
    double leg_bottom_y = -1.0;   // m; <0 means 0.2*H
    int passes = 5;               // serpentine vertical passes
    double margin = -1.0;         // m; <0 means 0.1*min(L,H)
    std::vector<Vec2> waypoints;  // polyline case
    double snap_tol = 0.0;        // m
};

// Chain mesh edges along a waypoint polyline. Nodes of the chain must lie
// within snap_tol of the polyline; chain endpoints are the nodes nearest the
// first/last waypoints. Throws EmbeddingError when no conforming chain exists.
VasculaturePath embed_polyline(const TriMesh& mesh, std::span<const Vec2> waypoints,
                               double snap_tol);

VasculaturePath make_case(const VascularCase& vcase, const TriMesh& mesh);

// Swap inlet and outlet: node order reversed, tangents negated, s -> 1-s.
// Applying twice returns the original path exactly.
VasculaturePath reverse_orientation(const VasculaturePath& path);

// (s, field value) per chain node, ordered by s.
std::vector<std::pair<double, double>> profile_along(const VasculaturePath& path,
                                                     std::span<const double> field);

// Rebuild s/tangents/edges from node_sequence (used by embed and reverse).
VasculaturePath path_from_nodes(const TriMesh& mesh, std::vector<int> node_sequence);

}  // namespace vtherm
