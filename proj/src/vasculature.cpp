#include "vtherm/vasculature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_set>

namespace vtherm {

namespace {

double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

// Shortest edge chain from `start` to `goal` through nodes lying within `tube`
// of segment [wa,wb]. A* with Euclidean heuristic; fixed iteration order keeps
// the result deterministic.
std::vector<int> shortest_conforming_chain(const TriMesh& mesh, int start, int goal,
                                           Vec2 wa, Vec2 wb, double tube) {
    auto admissible = [&](int v) {
        return v == start || v == goal ||
               dist_point_segment(mesh.nodes[v], wa, wb) <= tube;
    };
    const int n = mesh.node_count();
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<int> prev(n, -1);
    using Item = std::pair<double, int>;  // (g + heuristic, node)
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    g[start] = 0.0;
    open.push({norm(mesh.nodes[goal] - mesh.nodes[start]), start});
    while (!open.empty()) {
        const auto [f, v] = open.top();
        open.pop();
        if (v == goal) break;
        const double hv = norm(mesh.nodes[goal] - mesh.nodes[v]);
        if (f > g[v] + hv + 1e-15) continue;  // stale entry
        for (int w : mesh.node_neighbors[v]) {
            if (!admissible(w)) continue;
            const double cand = g[v] + mesh.edge_length(v, w);
            if (cand < g[w]) {
                g[w] = cand;
                prev[w] = v;
                open.push({cand + norm(mesh.nodes[goal] - mesh.nodes[w]), w});
            }
        }
    }
    if (!std::isfinite(g[goal])) return {};
    std::vector<int> chain;
    for (int v = goal; v != -1; v = prev[v]) chain.push_back(v);
    std::reverse(chain.begin(), chain.end());
    return chain;
}

}  // namespace

namespace {

// Derive edges, tangents and arc-length values from node_sequence/points.
// Deterministic in its inputs, so reversing a path twice reproduces the
// original arrays bit for bit.
void rebuild_derived(VasculaturePath& p) {
    const size_t n = p.node_sequence.size();
    if (n < 2) throw EmbeddingError("path needs at least two nodes");
    p.edge_chain.resize(n - 1);
    p.tangents.resize(n - 1);
    std::vector<double> cum(n, 0.0);
    for (size_t k = 0; k + 1 < n; ++k) {
        p.edge_chain[k] = {p.node_sequence[k], p.node_sequence[k + 1]};
        const Vec2 d = p.points[k + 1] - p.points[k];
        const double len = norm(d);
        if (len <= 0.0) throw EmbeddingError("zero-length edge in path");
        p.tangents[k] = (1.0 / len) * d;
        cum[k + 1] = cum[k] + len;
    }
    p.total_length = cum.back();
    p.s_values.resize(n);
    p.s_values.front() = 0.0;
    p.s_values.back() = 1.0;
    for (size_t k = 1; k + 1 < n; ++k) p.s_values[k] = cum[k] / p.total_length;
}

}  // namespace

VasculaturePath path_from_nodes(const TriMesh& mesh, std::vector<int> node_sequence) {
    VasculaturePath p;
    p.node_sequence = std::move(node_sequence);
    p.points.reserve(p.node_sequence.size());
    for (int v : p.node_sequence) p.points.push_back(mesh.nodes[v]);
    rebuild_derived(p);
    return p;
}

VasculaturePath embed_polyline(const TriMesh& mesh, std::span<const Vec2> waypoints,
                               double snap_tol) {
    if (waypoints.size() < 2) {
        throw std::invalid_argument("polyline needs at least 2 waypoints");
    }
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        if (norm(waypoints[i + 1] - waypoints[i]) == 0.0) {
            throw std::invalid_argument("consecutive waypoints must be distinct");
        }
    }
    // absorb roundoff in "exactly on the segment" checks
    const double tube = std::max(snap_tol, 1e-9 * std::max(mesh.width, mesh.height));

    std::vector<int> anchors(waypoints.size());
    for (size_t i = 0; i < waypoints.size(); ++i) {
        anchors[i] = mesh.nearest_node(waypoints[i]);
    }

    std::vector<int> seq{anchors[0]};
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        if (anchors[i] == anchors[i + 1]) {
            throw EmbeddingError("consecutive waypoints snap to the same mesh node; "
                                 "refine the mesh or spread the waypoints");
        }
        auto leg = shortest_conforming_chain(mesh, anchors[i], anchors[i + 1],
                                             waypoints[i], waypoints[i + 1], tube);
        if (leg.empty()) {
            throw EmbeddingError("no conforming edge chain within snap tolerance; "
                                 "refine the mesh or align waypoints with mesh edges");
        }
        seq.insert(seq.end(), leg.begin() + 1, leg.end());
    }

    std::unordered_set<int> uniq(seq.begin(), seq.end());
    if (uniq.size() != seq.size()) {
        throw EmbeddingError("embedded chain revisits a node; the polyline must be simple "
                             "on this mesh");
    }
    // the channel carries a two-sided flux jump; chain edges may touch the
    // hull at nodes but must not run along it
    for (size_t k = 0; k + 1 < seq.size(); ++k) {
        if (mesh.is_hull_edge(seq[k], seq[k + 1])) {
            throw EmbeddingError("chain edge lies on the domain boundary; move the "
                                 "polyline into the interior");
        }
    }
    return path_from_nodes(mesh, std::move(seq));
}

VasculaturePath make_case(const VascularCase& vcase, const TriMesh& mesh) {
    const double W = mesh.width, H = mesh.height;
    std::vector<Vec2> wps;
    switch (vcase.kind) {
        case VascularKind::straight: {
            // horizontal centerline, snapped to the nearest grid row
            const double yc = mesh.nodes[mesh.nearest_node({0.0, H / 2})].y;
            wps = {{0.0, yc}, {W, yc}};
            break;
        }
        case VascularKind::u_shape: {
            if (!(vcase.spacing_l > 0.0)) {
                throw std::invalid_argument("u_shape spacing_l must be positive");
            }
            const double xl = W / 2 - vcase.spacing_l / 2;
            const double xr = W / 2 + vcase.spacing_l / 2;
            const double ytop = vcase.leg_top_y >= 0.0 ? vcase.leg_top_y : H;
            const double ybot = vcase.leg_bottom_y >= 0.0 ? vcase.leg_bottom_y : 0.2 * H;
            if (xl <= 0.0 || xr >= W) {
                throw EmbeddingError("u_shape legs fall outside the domain; reduce spacing_l");
            }
            if (!(ybot < ytop) || ybot < 0.0 || ytop > H) {
                throw EmbeddingError("u_shape leg extents fall outside the domain");
            }
            wps = {{xl, ytop}, {xl, ybot}, {xr, ybot}, {xr, ytop}};
            break;
        }
        case VascularKind::serpentine: {
            if (vcase.passes < 2) {
                throw std::invalid_argument("serpentine needs at least 2 passes");
            }
            const double margin = vcase.margin >= 0.0 ? vcase.margin : 0.1 * std::min(W, H);
            if (!(margin > 0.0) || 2 * margin >= W || 2 * margin >= H) {
                throw EmbeddingError("serpentine margin leaves no room in the domain");
            }
            const double ytop = H - margin, ybot = margin;
            for (int k = 0; k < vcase.passes; ++k) {
                const double x = margin + k * (W - 2 * margin) / (vcase.passes - 1);
                if (k % 2 == 0) {
                    wps.push_back({x, ytop});
                    wps.push_back({x, ybot});
                } else {
                    wps.push_back({x, ybot});
                    wps.push_back({x, ytop});
                }
            }
            break;
        }
        case VascularKind::polyline: {
            if (vcase.waypoints.size() < 2) {
                throw std::invalid_argument("polyline case needs waypoints");
            }
            for (const Vec2& p : vcase.waypoints) {
                if (p.x < 0.0 || p.x > W || p.y < 0.0 || p.y > H) {
                    throw EmbeddingError("polyline waypoint outside the domain");
                }
            }
            wps = vcase.waypoints;
            break;
        }
    }
    return embed_polyline(mesh, wps, vcase.snap_tol);
}

VasculaturePath reverse_orientation(const VasculaturePath& path) {
    VasculaturePath p;
    p.node_sequence.assign(path.node_sequence.rbegin(), path.node_sequence.rend());
    p.points.assign(path.points.rbegin(), path.points.rend());
    rebuild_derived(p);
    return p;
}

std::vector<std::pair<double, double>> profile_along(const VasculaturePath& path,
                                                     std::span<const double> field) {
    std::vector<std::pair<double, double>> out;
    out.reserve(path.node_sequence.size());
    for (size_t k = 0; k < path.node_sequence.size(); ++k) {
        out.emplace_back(path.s_values[k], field[path.node_sequence[k]]);
    }
    return out;
}

}  // namespace vtherm
