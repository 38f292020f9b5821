// Planar triangle meshes of the rectangular plate, element-level geometric
// queries, and the two-sided jump/average operator algebra used across the
// embedded channel.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace vtherm {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

enum class Side { left, right, bottom, top };

enum class Diagonal { right, left, alternating };

struct BoundaryEdge {
    int a = -1;
    int b = -1;
    Side side = Side::left;
};

class ParseError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Immutable after construction; shared freely between concurrent solves.
struct TriMesh {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> elements;  // CCW node triples
    std::vector<BoundaryEdge> boundary_edges;
    std::vector<double> element_areas;         // m^2, positive
    double width = 0.0;                        // domain [0,width]x[0,height]
    double height = 0.0;

    // neighbor node ids, sorted ascending, one list per node
    std::vector<std::vector<int>> node_neighbors;

    // keys of edges adjacent to exactly one element, sorted
    std::vector<std::uint64_t> hull_edge_keys;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int element_count() const { return static_cast<int>(elements.size()); }
    double total_area() const;
    bool has_edge(int a, int b) const;
    bool is_hull_edge(int a, int b) const;
    int nearest_node(Vec2 p) const;
    double edge_length(int a, int b) const { return norm(nodes[b] - nodes[a]); }
};

TriMesh build_structured_mesh(double length, double height, int nx, int ny,
                              Diagonal diag = Diagonal::right);

// ASCII mesh format:
//   vtmesh 1
//   nodes N        followed by N lines "x y"
//   elements M     followed by M lines "i j k"   (0-based, CCW)
//   boundary B     followed by B lines "i j tag" (tag: left/right/top/bottom)
// Whitespace-delimited; '#' starts a comment.
TriMesh load_mesh(const std::string& text);
std::string write_mesh(const TriMesh& mesh);

// Two-sided trace across an interior edge of the channel. The normals must be
// unit length and opposite; the operators check this.
template <typename T>
struct SidedTrace {
    T plus_value{};
    T minus_value{};
    Vec2 plus_normal{};
    Vec2 minus_normal{};
};

using ScalarTrace = SidedTrace<double>;
using VectorTrace = SidedTrace<Vec2>;

Vec2 jump_scalar(const ScalarTrace& t);     // [[a]] = a+ n+ + a- n-
double avg_scalar(const ScalarTrace& t);    // <a>  = (a+ + a-)/2
double jump_vector(const VectorTrace& t);   // [[v]] = v+.n+ + v-.n-
Vec2 avg_vector(const VectorTrace& t);      // <v>  = (v+ + v-)/2

// Constant gradient of the P1 interpolant on one element.
Vec2 element_gradient(const TriMesh& mesh, std::span<const double> field, int element);

// Gradients of the three P1 basis functions on an element.
std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, int element);

}  // namespace vtherm
