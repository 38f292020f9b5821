#include "vtherm/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace vtherm {

namespace {

constexpr double kNormalTol = 1e-12;

std::uint64_t edge_key(int a, int b) {
    const auto lo = static_cast<std::uint64_t>(std::min(a, b));
    const auto hi = static_cast<std::uint64_t>(std::max(a, b));
    return (hi << 32) | lo;
}

const char* side_name(Side s) {
    switch (s) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::bottom: return "bottom";
        case Side::top: return "top";
    }
    return "?";
}

Side side_from_name(const std::string& name, int line) {
    if (name == "left") return Side::left;
    if (name == "right") return Side::right;
    if (name == "bottom") return Side::bottom;
    if (name == "top") return Side::top;
    throw ParseError("line " + std::to_string(line) + ": unknown boundary tag '" + name + "'");
}

double signed_area(const TriMesh& m, const std::array<int, 3>& e) {
    const Vec2 a = m.nodes[e[0]], b = m.nodes[e[1]], c = m.nodes[e[2]];
    return 0.5 * cross(b - a, c - a);
}

void build_adjacency(TriMesh& m) {
    m.node_neighbors.assign(m.nodes.size(), {});
    for (const auto& e : m.elements) {
        for (int k = 0; k < 3; ++k) {
            const int a = e[k], b = e[(k + 1) % 3];
            m.node_neighbors[a].push_back(b);
            m.node_neighbors[b].push_back(a);
        }
    }
    for (auto& nb : m.node_neighbors) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
    }
}

// Shared invariant checks for generated and parsed meshes. `line_of_element`
// maps element index to a source line for parse diagnostics (or nullptr).
void finalize_and_validate(TriMesh& m, const std::vector<int>* element_lines,
                           const std::vector<int>* boundary_lines) {
    auto fail = [&](const std::string& what, const std::vector<int>* lines, size_t i) {
        if (lines) {
            throw ParseError("line " + std::to_string((*lines)[i]) + ": " + what);
        }
        throw std::invalid_argument(what);
    };

    m.element_areas.resize(m.elements.size());
    for (size_t k = 0; k < m.elements.size(); ++k) {
        const double a = signed_area(m, m.elements[k]);
        if (!(a > 0.0)) {
            fail("inverted element (nonpositive signed area)", element_lines, k);
        }
        m.element_areas[k] = a;
    }

    double maxx = 0.0, maxy = 0.0;
    for (const Vec2& p : m.nodes) {
        if (p.x < -1e-12 || p.y < -1e-12) {
            throw std::invalid_argument("node coordinates must lie in [0,L]x[0,H]");
        }
        maxx = std::max(maxx, p.x);
        maxy = std::max(maxy, p.y);
    }
    if (m.width <= 0.0) m.width = maxx;
    if (m.height <= 0.0) m.height = maxy;

    // edge -> number of adjacent elements
    std::unordered_map<std::uint64_t, int> edge_use;
    edge_use.reserve(m.elements.size() * 3);
    for (const auto& e : m.elements) {
        for (int k = 0; k < 3; ++k) {
            ++edge_use[edge_key(e[k], e[(k + 1) % 3])];
        }
    }
    m.hull_edge_keys.clear();
    for (const auto& [key, uses] : edge_use) {
        if (uses == 1) m.hull_edge_keys.push_back(key);
    }
    std::sort(m.hull_edge_keys.begin(), m.hull_edge_keys.end());
    for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
        const auto& be = m.boundary_edges[i];
        const auto it = edge_use.find(edge_key(be.a, be.b));
        if (it == edge_use.end()) {
            fail("boundary edge is not an element edge", boundary_lines, i);
        }
        if (it->second != 1) {
            fail("boundary edge belongs to more than one element", boundary_lines, i);
        }
    }

    build_adjacency(m);

    // connectivity
    std::vector<char> seen(m.nodes.size(), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    size_t reached = 1;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int w : m.node_neighbors[v]) {
            if (!seen[w]) {
                seen[w] = 1;
                ++reached;
                q.push(w);
            }
        }
    }
    if (reached != m.nodes.size()) {
        throw std::invalid_argument("mesh is not connected");
    }
}

void check_unit_opposite(Vec2 np, Vec2 nm) {
    if (std::abs(norm(np) - 1.0) > kNormalTol || std::abs(norm(nm) - 1.0) > kNormalTol) {
        throw std::invalid_argument("trace normals must be unit length");
    }
    if (std::abs(np.x + nm.x) > kNormalTol || std::abs(np.y + nm.y) > kNormalTol) {
        throw std::invalid_argument("trace normals must be opposite");
    }
}

}  // namespace

double TriMesh::total_area() const {
    double s = 0.0;
    for (double a : element_areas) s += a;
    return s;
}

bool TriMesh::has_edge(int a, int b) const {
    const auto& nb = node_neighbors[a];
    return std::binary_search(nb.begin(), nb.end(), b);
}

bool TriMesh::is_hull_edge(int a, int b) const {
    return std::binary_search(hull_edge_keys.begin(), hull_edge_keys.end(),
                              edge_key(a, b));
}

int TriMesh::nearest_node(Vec2 p) const {
    int best = 0;
    double best_d = std::numeric_limits<double>::max();
    for (size_t i = 0; i < nodes.size(); ++i) {
        const Vec2 d = nodes[i] - p;
        const double dd = dot(d, d);
        if (dd < best_d) {
            best_d = dd;
            best = static_cast<int>(i);
        }
    }
    return best;
}

TriMesh build_structured_mesh(double length, double height, int nx, int ny, Diagonal diag) {
    if (!(length > 0.0) || !(height > 0.0)) {
        throw std::invalid_argument("domain dimensions must be positive");
    }
    if (nx < 1 || ny < 1) {
        throw std::invalid_argument("cell counts must be at least 1");
    }
    TriMesh m;
    m.width = length;
    m.height = height;
    m.nodes.reserve(static_cast<size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            m.nodes.push_back({length * i / nx, height * j / ny});
        }
    }
    auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
    m.elements.reserve(static_cast<size_t>(2) * nx * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            const bool right = diag == Diagonal::right ||
                               (diag == Diagonal::alternating && (i + j) % 2 == 0);
            if (right) {
                m.elements.push_back({a, b, c});
                m.elements.push_back({a, c, d});
            } else {
                m.elements.push_back({a, b, d});
                m.elements.push_back({b, c, d});
            }
        }
    }
    for (int i = 0; i < nx; ++i) {
        m.boundary_edges.push_back({id(i, 0), id(i + 1, 0), Side::bottom});
        m.boundary_edges.push_back({id(i, ny), id(i + 1, ny), Side::top});
    }
    for (int j = 0; j < ny; ++j) {
        m.boundary_edges.push_back({id(0, j), id(0, j + 1), Side::left});
        m.boundary_edges.push_back({id(nx, j), id(nx, j + 1), Side::right});
    }
    finalize_and_validate(m, nullptr, nullptr);
    return m;
}

TriMesh load_mesh(const std::string& text) {
    struct Token {
        std::string s;
        int line;
    };
    std::vector<Token> toks;
    {
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            std::istringstream ls(line);
            std::string t;
            while (ls >> t) toks.push_back({t, lineno});
        }
    }
    size_t pos = 0;
    auto next = [&](const char* what) -> const Token& {
        if (pos >= toks.size()) {
            throw ParseError(std::string("unexpected end of mesh file, expected ") + what);
        }
        return toks[pos++];
    };
    auto next_int = [&](const char* what) {
        const Token& t = next(what);
        try {
            size_t used = 0;
            const long v = std::stol(t.s, &used);
            if (used != t.s.size()) throw std::invalid_argument("");
            return static_cast<int>(v);
        } catch (...) {
            throw ParseError("line " + std::to_string(t.line) + ": expected integer for " +
                             what + ", got '" + t.s + "'");
        }
    };
    auto next_double = [&](const char* what) {
        const Token& t = next(what);
        try {
            size_t used = 0;
            const double v = std::stod(t.s, &used);
            if (used != t.s.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ParseError("line " + std::to_string(t.line) + ": expected number for " +
                             what + ", got '" + t.s + "'");
        }
    };
    auto expect_word = [&](const char* word) {
        const Token& t = next(word);
        if (t.s != word) {
            throw ParseError("line " + std::to_string(t.line) + ": expected '" + word +
                             "', got '" + t.s + "'");
        }
        return t.line;
    };

    expect_word("vtmesh");
    {
        const Token& t = next("format version");
        if (t.s != "1") {
            throw ParseError("line " + std::to_string(t.line) + ": unsupported mesh version '" +
                             t.s + "'");
        }
    }

    TriMesh m;
    expect_word("nodes");
    const int n_nodes = next_int("node count");
    if (n_nodes < 3) throw ParseError("mesh needs at least 3 nodes");
    m.nodes.resize(n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        m.nodes[i].x = next_double("node x");
        m.nodes[i].y = next_double("node y");
    }

    expect_word("elements");
    const int n_el = next_int("element count");
    if (n_el < 1) throw ParseError("mesh needs at least 1 element");
    m.elements.resize(n_el);
    std::vector<int> element_lines(n_el);
    for (int k = 0; k < n_el; ++k) {
        element_lines[k] = pos < toks.size() ? toks[pos].line : 0;
        for (int v = 0; v < 3; ++v) {
            const int idx = next_int("element node index");
            if (idx < 0 || idx >= n_nodes) {
                throw ParseError("line " + std::to_string(element_lines[k]) +
                                 ": node index " + std::to_string(idx) + " out of range");
            }
            m.elements[k][v] = idx;
        }
    }

    expect_word("boundary");
    const int n_b = next_int("boundary edge count");
    m.boundary_edges.resize(n_b);
    std::vector<int> boundary_lines(n_b);
    for (int k = 0; k < n_b; ++k) {
        boundary_lines[k] = pos < toks.size() ? toks[pos].line : 0;
        const int a = next_int("boundary node index");
        const int b = next_int("boundary node index");
        if (a < 0 || a >= n_nodes || b < 0 || b >= n_nodes) {
            throw ParseError("line " + std::to_string(boundary_lines[k]) +
                             ": boundary node index out of range");
        }
        const Token& t = next("boundary tag");
        m.boundary_edges[k] = {a, b, side_from_name(t.s, t.line)};
    }
    if (pos != toks.size()) {
        throw ParseError("line " + std::to_string(toks[pos].line) + ": trailing content '" +
                         toks[pos].s + "'");
    }

    finalize_and_validate(m, &element_lines, &boundary_lines);
    return m;
}

std::string write_mesh(const TriMesh& mesh) {
    std::string out;
    out.reserve(mesh.nodes.size() * 48 + mesh.elements.size() * 24);
    char buf[128];
    out += "vtmesh 1\n";
    std::snprintf(buf, sizeof buf, "nodes %d\n", mesh.node_count());
    out += buf;
    for (const Vec2& p : mesh.nodes) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "elements %d\n", mesh.element_count());
    out += buf;
    for (const auto& e : mesh.elements) {
        std::snprintf(buf, sizeof buf, "%d %d %d\n", e[0], e[1], e[2]);
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "boundary %zu\n", mesh.boundary_edges.size());
    out += buf;
    for (const auto& be : mesh.boundary_edges) {
        std::snprintf(buf, sizeof buf, "%d %d %s\n", be.a, be.b, side_name(be.side));
        out += buf;
    }
    return out;
}

Vec2 jump_scalar(const ScalarTrace& t) {
    check_unit_opposite(t.plus_normal, t.minus_normal);
    return t.plus_value * t.plus_normal + t.minus_value * t.minus_normal;
}

double avg_scalar(const ScalarTrace& t) {
    check_unit_opposite(t.plus_normal, t.minus_normal);
    return 0.5 * (t.plus_value + t.minus_value);
}

double jump_vector(const VectorTrace& t) {
    check_unit_opposite(t.plus_normal, t.minus_normal);
    return dot(t.plus_value, t.plus_normal) + dot(t.minus_value, t.minus_normal);
}

Vec2 avg_vector(const VectorTrace& t) {
    check_unit_opposite(t.plus_normal, t.minus_normal);
    return 0.5 * (t.plus_value + t.minus_value);
}

std::array<Vec2, 3> basis_gradients(const TriMesh& mesh, int element) {
    const auto& e = mesh.elements[element];
    const Vec2 p0 = mesh.nodes[e[0]], p1 = mesh.nodes[e[1]], p2 = mesh.nodes[e[2]];
    const double inv2a = 1.0 / (2.0 * mesh.element_areas[element]);
    return {Vec2{(p1.y - p2.y) * inv2a, (p2.x - p1.x) * inv2a},
            Vec2{(p2.y - p0.y) * inv2a, (p0.x - p2.x) * inv2a},
            Vec2{(p0.y - p1.y) * inv2a, (p1.x - p0.x) * inv2a}};
}

Vec2 element_gradient(const TriMesh& mesh, std::span<const double> field, int element) {
    if (element < 0 || element >= mesh.element_count()) {
        throw std::out_of_range("element index out of range");
    }
    if (field.size() != mesh.nodes.size()) {
        throw std::invalid_argument("field length must equal node count");
    }
    const auto g = basis_gradients(mesh, element);
    const auto& e = mesh.elements[element];
    Vec2 grad{0.0, 0.0};
    for (int k = 0; k < 3; ++k) {
        grad = grad + field[e[k]] * g[k];
    }
    return grad;
}

}  // namespace vtherm
