#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "teig/geometry.hpp"

namespace teig {

// Conforming triangle mesh of a simply connected planar domain.
//
// Vertex numbering convention: the boundary vertices occupy the trailing
// contiguous index block [N - NB, N), ordered along the (single, CCW)
// boundary loop. Downstream FEM code identifies dof i with vertex i and
// boundary slot b with vertex N - NB + b. All generators, uniform_refine
// and load_mesh normalize to this numbering.
struct Mesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> triangles;       // CCW vertex triples
    std::vector<std::array<int, 2>> boundary_edges;  // oriented along the loop
    std::vector<int> boundary_vertices;              // loop order == [N-NB, N)
    double h = 0.0;                                  // maximum edge length

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_boundary() const { return static_cast<int>(boundary_vertices.size()); }

    double triangle_area(int t) const {
        const auto& tri = triangles[t];
        return teig::triangle_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
    }
    double total_area() const;
    double boundary_length() const;
};

struct MeshStatistics {
    double h = 0.0;
    int num_vertices = 0;
    int num_boundary_vertices = 0;
    double total_area = 0.0;
    double min_angle_deg = 0.0;
};

// Circle used to pull refined boundary midpoints back onto a curved boundary.
struct CircleBoundary {
    Point2 center;
    double radius;
};

// Disc {|x| < radius} meshed with concentric vertex rings (6k points on
// ring k); boundary vertices land on the circle to roundoff.
Mesh generate_disc_mesh(double radius, double target_h);

// Rotated square {|x| + |y| < half_width} from a uniform grid in the
// 45-degree frame; the grid count is kept even so no element edge midpoint
// falls on the origin.
Mesh generate_diamond_mesh(double half_width, double target_h);

// Each triangle splits into 4 via edge midpoints. When project_to is given,
// midpoints of boundary edges are moved radially onto the circle.
Mesh uniform_refine(const Mesh& mesh, std::optional<CircleBoundary> project_to = std::nullopt);

MeshStatistics mesh_statistics(const Mesh& mesh);

// Combinatorial/geometric invariant scan: positive areas, edge-manifold
// property, exactly one closed boundary loop, trailing boundary block,
// h == max edge. Throws std::runtime_error describing the first violation.
void validate_mesh(const Mesh& mesh);

// Plain-text exchange format:
//   vertices N triangles T boundary_edges B
// followed by one line per vertex (x y, 17 significant digits), per
// triangle (i j k) and per boundary edge (i j).
void save_mesh(const Mesh& mesh, const std::string& path);
Mesh load_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);
Mesh read_mesh(std::istream& in);

}  // namespace teig
