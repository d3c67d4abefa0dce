#include "teig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace teig {

namespace {

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(a) << 32) | static_cast<uint64_t>(b);
}

double max_edge_length(const Mesh& mesh) {
    double h = 0.0;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e)
            h = std::max(h, dist(mesh.vertices[tri[e]], mesh.vertices[tri[(e + 1) % 3]]));
    return h;
}

// Extracts the boundary loop (edges used by exactly one triangle, oriented as
// in their triangle, i.e. CCW around the domain), then renumbers vertices so
// the loop occupies the trailing block in loop order. Also recomputes h.
void finalize_mesh(Mesh& mesh) {
    const int nv = mesh.num_vertices();

    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
        const double area = mesh.triangle_area(static_cast<int>(t));
        if (area == 0.0)
            throw std::runtime_error("mesh: degenerate triangle " + std::to_string(t));
        if (area < 0.0) std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
    }

    // Count edge usage; remember the oriented copy from its triangle.
    std::unordered_map<uint64_t, int> use_count;
    std::unordered_map<uint64_t, std::array<int, 2>> oriented;
    use_count.reserve(mesh.triangles.size() * 3);
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            uint64_t k = edge_key(a, b);
            if (++use_count[k] == 1) oriented[k] = {a, b};
        }
    }

    std::unordered_map<int, int> next_on_loop;
    int loop_edges = 0;
    for (const auto& [k, c] : use_count) {
        if (c == 1) {
            const auto& e = oriented[k];
            if (!next_on_loop.emplace(e[0], e[1]).second)
                throw std::runtime_error("mesh: boundary is not a single loop (branching vertex)");
            ++loop_edges;
        } else if (c != 2) {
            throw std::runtime_error("mesh: edge shared by more than two triangles");
        }
    }
    if (loop_edges == 0) throw std::runtime_error("mesh: no boundary found");

    // Walk the loop from the smallest boundary vertex index (deterministic).
    int start = std::numeric_limits<int>::max();
    for (const auto& [v, w] : next_on_loop) start = std::min(start, v);
    std::vector<int> loop;
    loop.reserve(loop_edges);
    int v = start;
    do {
        loop.push_back(v);
        auto it = next_on_loop.find(v);
        if (it == next_on_loop.end()) throw std::runtime_error("mesh: open boundary chain");
        v = it->second;
    } while (v != start && static_cast<int>(loop.size()) <= loop_edges);
    if (v != start || static_cast<int>(loop.size()) != loop_edges)
        throw std::runtime_error("mesh: boundary edges form more than one loop");

    // Permute: interior vertices keep relative order, loop goes to the tail.
    const int nb = static_cast<int>(loop.size());
    std::vector<int> perm(nv, -1);
    for (int i = 0; i < nb; ++i) perm[loop[i]] = nv - nb + i;
    int next_id = 0;
    for (int i = 0; i < nv; ++i)
        if (perm[i] < 0) perm[i] = next_id++;
    if (next_id != nv - nb) throw std::runtime_error("mesh: boundary loop does not cover all boundary vertices");

    std::vector<Point2> new_vertices(nv);
    for (int i = 0; i < nv; ++i) new_vertices[perm[i]] = mesh.vertices[i];
    mesh.vertices = std::move(new_vertices);
    for (auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) tri[e] = perm[tri[e]];

    mesh.boundary_vertices.resize(nb);
    mesh.boundary_edges.resize(nb);
    for (int i = 0; i < nb; ++i) {
        mesh.boundary_vertices[i] = nv - nb + i;
        mesh.boundary_edges[i] = {nv - nb + i, nv - nb + (i + 1) % nb};
    }
    mesh.h = max_edge_length(mesh);
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value))
        throw std::invalid_argument(std::string("mesh: ") + name + " must be positive and finite");
}

}  // namespace

double Mesh::total_area() const {
    double area = 0.0;
    for (int t = 0; t < num_triangles(); ++t) area += triangle_area(t);
    return area;
}

double Mesh::boundary_length() const {
    double len = 0.0;
    for (const auto& e : boundary_edges) len += dist(vertices[e[0]], vertices[e[1]]);
    return len;
}

Mesh generate_disc_mesh(double radius, double target_h) {
    require_positive(radius, "radius");
    require_positive(target_h, "target_h");
    if (!(target_h < radius)) throw std::invalid_argument("mesh: target_h must be smaller than radius");

    // Ring construction: ring k of n carries 6k vertices at radius k*radius/n.
    // The largest edge shrinks like radius/n; grow n until h fits.
    int n = std::max(1, static_cast<int>(std::ceil(radius / target_h)));
    for (;; ++n) {
        Mesh mesh;
        mesh.vertices.push_back({0.0, 0.0});
        std::vector<int> ring_start(n + 1, 0);
        for (int k = 1; k <= n; ++k) {
            ring_start[k] = mesh.num_vertices();
            const double r = radius * k / n;
            const int m = 6 * k;
            for (int j = 0; j < m; ++j) {
                const double th = 2.0 * std::numbers::pi * j / m;
                mesh.vertices.push_back({r * std::cos(th), r * std::sin(th)});
            }
        }
        for (int k = 1; k <= n; ++k) {
            const int m2 = 6 * k;
            const int out0 = ring_start[k];
            if (k == 1) {
                for (int j = 0; j < 6; ++j)
                    mesh.triangles.push_back({0, out0 + j, out0 + (j + 1) % 6});
                continue;
            }
            const int m1 = 6 * (k - 1);
            const int in0 = ring_start[k - 1];
            int i = 0, j = 0;
            while (i < m1 || j < m2) {
                const double ti = 2.0 * std::numbers::pi * (i + 1) / m1;
                const double tj = 2.0 * std::numbers::pi * (j + 1) / m2;
                if (j < m2 && (i == m1 || tj <= ti)) {
                    mesh.triangles.push_back({in0 + i % m1, out0 + j % m2, out0 + (j + 1) % m2});
                    ++j;
                } else {
                    mesh.triangles.push_back({in0 + i % m1, out0 + j % m2, in0 + (i + 1) % m1});
                    ++i;
                }
            }
        }
        finalize_mesh(mesh);
        if (mesh.h <= target_h) return mesh;
    }
}

Mesh generate_diamond_mesh(double half_width, double target_h) {
    require_positive(half_width, "half_width");
    require_positive(target_h, "target_h");
    if (!(target_h < half_width)) throw std::invalid_argument("mesh: target_h must be smaller than half_width");

    // Uniform grid on the axis-aligned square in the 45-degree frame; the
    // diagonal of a grid cell has length 2*half_width/m and is the longest
    // edge. m stays even so the origin is a grid vertex, never an edge
    // midpoint (keeps quadrature points away from it).
    int m = static_cast<int>(std::ceil(2.0 * half_width / target_h));
    if (m % 2 == 1) ++m;
    const double a = half_width / std::numbers::sqrt2;
    const double delta = 2.0 * a / m;

    Mesh mesh;
    mesh.vertices.reserve(static_cast<size_t>(m + 1) * (m + 1));
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (int i = 0; i <= m; ++i) {
        for (int j = 0; j <= m; ++j) {
            const double xi = -a + i * delta;
            const double zeta = -a + j * delta;
            mesh.vertices.push_back({(xi - zeta) * inv_sqrt2, (xi + zeta) * inv_sqrt2});
        }
    }
    auto vid = [m](int i, int j) { return i * (m + 1) + j; };
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
            mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
        }
    }
    finalize_mesh(mesh);
    return mesh;
}

Mesh uniform_refine(const Mesh& mesh, std::optional<CircleBoundary> project_to) {
    Mesh out;
    out.vertices = mesh.vertices;

    std::unordered_map<uint64_t, int> boundary;
    for (const auto& e : mesh.boundary_edges) boundary.emplace(edge_key(e[0], e[1]), 1);

    std::unordered_map<uint64_t, int> mid_id;
    mid_id.reserve(mesh.triangles.size() * 2);
    auto midpoint_of = [&](int va, int vb) {
        const uint64_t k = edge_key(va, vb);
        auto it = mid_id.find(k);
        if (it != mid_id.end()) return it->second;
        Point2 p = midpoint(mesh.vertices[va], mesh.vertices[vb]);
        if (project_to && boundary.count(k)) {
            const Point2 d = p - project_to->center;
            const double len = norm(d);
            if (len > 0.0) p = project_to->center + (project_to->radius / len) * d;
        }
        const int id = out.num_vertices();
        out.vertices.push_back(p);
        mid_id.emplace(k, id);
        return id;
    };

    out.triangles.reserve(mesh.triangles.size() * 4);
    for (const auto& tri : mesh.triangles) {
        const int m01 = midpoint_of(tri[0], tri[1]);
        const int m12 = midpoint_of(tri[1], tri[2]);
        const int m20 = midpoint_of(tri[2], tri[0]);
        out.triangles.push_back({tri[0], m01, m20});
        out.triangles.push_back({tri[1], m12, m01});
        out.triangles.push_back({tri[2], m20, m12});
        out.triangles.push_back({m01, m12, m20});
    }
    finalize_mesh(out);
    return out;
}

MeshStatistics mesh_statistics(const Mesh& mesh) {
    MeshStatistics s;
    s.h = mesh.h;
    s.num_vertices = mesh.num_vertices();
    s.num_boundary_vertices = mesh.num_boundary();
    s.total_area = mesh.total_area();
    double min_angle = std::numbers::pi;
    for (const auto& tri : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const Point2 u = mesh.vertices[tri[(e + 1) % 3]] - mesh.vertices[tri[e]];
            const Point2 v = mesh.vertices[tri[(e + 2) % 3]] - mesh.vertices[tri[e]];
            min_angle = std::min(min_angle, std::atan2(std::abs(u.x * v.y - u.y * v.x), dot(u, v)));
        }
    }
    s.min_angle_deg = min_angle * 180.0 / std::numbers::pi;
    return s;
}

void validate_mesh(const Mesh& mesh) {
    const int nv = mesh.num_vertices();
    const int nb = mesh.num_boundary();
    for (const auto& p : mesh.vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::runtime_error("mesh: non-finite vertex coordinate");

    for (size_t t = 0; t < mesh.triangles.size(); ++t)
        if (mesh.triangle_area(static_cast<int>(t)) <= 0.0)
            throw std::runtime_error("mesh: nonpositive area at triangle " + std::to_string(t));

    std::unordered_map<uint64_t, int> use_count;
    for (const auto& tri : mesh.triangles)
        for (int e = 0; e < 3; ++e) ++use_count[edge_key(tri[e], tri[(e + 1) % 3])];
    int boundary_count = 0;
    for (const auto& [k, c] : use_count) {
        if (c == 1)
            ++boundary_count;
        else if (c != 2)
            throw std::runtime_error("mesh: edge in more than two triangles");
    }
    if (boundary_count != static_cast<int>(mesh.boundary_edges.size()))
        throw std::runtime_error("mesh: boundary_edges inconsistent with single-use edges");
    for (const auto& e : mesh.boundary_edges) {
        auto it = use_count.find(edge_key(e[0], e[1]));
        if (it == use_count.end() || it->second != 1)
            throw std::runtime_error("mesh: listed boundary edge is not a single-use edge");
    }

    for (int i = 0; i < nb; ++i) {
        if (mesh.boundary_vertices[i] != nv - nb + i)
            throw std::runtime_error("mesh: boundary vertices are not the trailing index block");
        const auto& e = mesh.boundary_edges[i];
        if (e[0] != nv - nb + i || e[1] != nv - nb + (i + 1) % nb)
            throw std::runtime_error("mesh: boundary edges do not chain the boundary loop");
    }

    const double h = max_edge_length(mesh);
    if (std::abs(h - mesh.h) > 1e-12 * std::max(1.0, h))
        throw std::runtime_error("mesh: stored h differs from max edge length");
}

void write_mesh(const Mesh& mesh, std::ostream& out) {
    out << "vertices " << mesh.num_vertices() << " triangles " << mesh.num_triangles()
        << " boundary_edges " << mesh.boundary_edges.size() << "\n";
    out << std::setprecision(17);
    for (const auto& p : mesh.vertices) out << p.x << " " << p.y << "\n";
    for (const auto& t : mesh.triangles) out << t[0] << " " << t[1] << " " << t[2] << "\n";
    for (const auto& e : mesh.boundary_edges) out << e[0] << " " << e[1] << "\n";
}

Mesh read_mesh(std::istream& in) {
    std::string kw_v, kw_t, kw_b;
    int nv = 0, nt = 0, nbe = 0;
    in >> kw_v >> nv >> kw_t >> nt >> kw_b >> nbe;
    if (!in || kw_v != "vertices" || kw_t != "triangles" || kw_b != "boundary_edges")
        throw std::runtime_error("mesh file: bad header");
    Mesh mesh;
    mesh.vertices.resize(nv);
    for (auto& p : mesh.vertices) in >> p.x >> p.y;
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) in >> t[0] >> t[1] >> t[2];
    std::vector<std::array<int, 2>> edges(nbe);
    for (auto& e : edges) in >> e[0] >> e[1];
    if (!in) throw std::runtime_error("mesh file: truncated");
    finalize_mesh(mesh);  // normalizes numbering, rebuilds loop, recomputes h
    if (static_cast<int>(mesh.boundary_edges.size()) != nbe)
        throw std::runtime_error("mesh file: boundary edge count mismatch");
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open mesh file for writing: " + path);
    write_mesh(mesh, out);
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    return read_mesh(in);
}

}  // namespace teig
