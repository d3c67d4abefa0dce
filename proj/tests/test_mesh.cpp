#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "teig/mesh.hpp"

using namespace teig;

namespace {

Mesh unit_right_triangle() {
    std::istringstream in(
        "vertices 3 triangles 1 boundary_edges 3\n"
        "0 0\n1 0\n0 1\n"
        "0 1 2\n"
        "0 1\n1 2\n2 0\n");
    return read_mesh(in);
}

int count_edges(const Mesh& mesh) {
    std::set<std::pair<int, int>> edges;
    for (const auto& t : mesh.triangles)
        for (int e = 0; e < 3; ++e) {
            int a = t[e], b = t[(e + 1) % 3];
            edges.insert({std::min(a, b), std::max(a, b)});
        }
    return static_cast<int>(edges.size());
}

}  // namespace

TEST_SUITE_BEGIN("mesh");

TEST_CASE("disc mesh stays inside the closed disc with boundary on the circle") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    validate_mesh(mesh);
    CHECK(mesh.h <= 0.1);
    for (const auto& p : mesh.vertices) CHECK(norm(p) <= 0.5 + 1e-12);
    for (int v : mesh.boundary_vertices) CHECK(std::abs(norm(mesh.vertices[v]) - 0.5) <= 1e-12 * 0.5);
}

TEST_CASE("disc area defect shrinks ~4x per halving of h") {
    const double exact = std::numbers::pi * 0.25;
    double defect[3];
    double h = 0.1;
    for (int i = 0; i < 3; ++i, h /= 2) {
        const Mesh mesh = generate_disc_mesh(0.5, h);
        defect[i] = exact - mesh.total_area();
        CHECK(defect[i] > 0.0);  // inscribed polygon
    }
    for (int i = 0; i + 1 < 3; ++i) {
        const double ratio = defect[i] / defect[i + 1];
        CHECK(ratio > 2.5);
        CHECK(ratio < 6.0);
    }
}

TEST_CASE("disc refinement monotonicity") {
    const Mesh coarse = generate_disc_mesh(0.5, 0.1);
    const Mesh fine = generate_disc_mesh(0.5, 0.05);
    CHECK(fine.h <= 0.05);
    CHECK(fine.num_vertices() > coarse.num_vertices());
}

TEST_CASE("disc generator rejects bad arguments") {
    CHECK_THROWS_AS(generate_disc_mesh(-1.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(generate_disc_mesh(0.5, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(generate_disc_mesh(0.5, 0.6), std::invalid_argument);
    CHECK_THROWS_AS(generate_diamond_mesh(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(generate_diamond_mesh(1.0, -0.2), std::invalid_argument);
}

TEST_CASE("diamond mesh has exact area and exact boundary") {
    const Mesh mesh = generate_diamond_mesh(1.0, 0.1);
    validate_mesh(mesh);
    CHECK(mesh.total_area() == doctest::Approx(2.0).epsilon(1e-14));
    for (int v : mesh.boundary_vertices) {
        const Point2 p = mesh.vertices[v];
        CHECK(std::abs(std::abs(p.x) + std::abs(p.y) - 1.0) <= 1e-12);
    }
}

TEST_CASE("diamond family for the nested-refinement tables") {
    // target h = 1/10, 1/20, 1/40, 1/80 hit exactly on the grid construction
    for (double h : {0.1, 0.05, 0.025, 0.0125}) {
        const Mesh mesh = generate_diamond_mesh(1.0, h);
        CHECK(mesh.h == doctest::Approx(h).epsilon(1e-12));
    }
}

TEST_CASE("uniform refinement: combinatorics, area, projection") {
    const Mesh diamond = generate_diamond_mesh(1.0, 0.25);
    const Mesh refined = uniform_refine(diamond);
    validate_mesh(refined);
    CHECK(refined.num_triangles() == 4 * diamond.num_triangles());
    // Euler characteristic of a triangulated disk: V - E + F = 1
    CHECK(refined.num_vertices() - count_edges(refined) + refined.num_triangles() == 1);
    CHECK(refined.total_area() == doctest::Approx(diamond.total_area()).epsilon(1e-14));

    const Mesh disc = generate_disc_mesh(0.5, 0.1);
    const Mesh disc_ref = uniform_refine(disc, CircleBoundary{{0.0, 0.0}, 0.5});
    validate_mesh(disc_ref);
    for (int v : disc_ref.boundary_vertices)
        CHECK(std::abs(norm(disc_ref.vertices[v]) - 0.5) <= 1e-12);
    CHECK(disc_ref.h <= disc.h / 2 * 1.001);

    // without projection the children are similar to the parent
    const Mesh disc_flat = uniform_refine(disc);
    CHECK(mesh_statistics(disc_flat).min_angle_deg ==
          doctest::Approx(mesh_statistics(disc).min_angle_deg).epsilon(1e-12));
}

TEST_CASE("mesh statistics on the reference triangle and the test domains") {
    const MeshStatistics tri = mesh_statistics(unit_right_triangle());
    CHECK(tri.total_area == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tri.min_angle_deg == doctest::Approx(45.0).epsilon(1e-13));
    CHECK(tri.num_vertices == 3);
    CHECK(tri.num_boundary_vertices == 3);

    CHECK(mesh_statistics(generate_diamond_mesh(1.0, 0.1)).total_area == doctest::Approx(2.0));
    CHECK(mesh_statistics(generate_diamond_mesh(1.0, 0.1)).min_angle_deg == doctest::Approx(45.0));

    // regression bound for the ring generator (measured once, frozen)
    CHECK(mesh_statistics(generate_disc_mesh(0.5, 0.05)).min_angle_deg >= 20.0);
}

TEST_CASE("projection degrades the minimum angle only mildly across refinements") {
    Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const double base = mesh_statistics(mesh).min_angle_deg;
    for (int i = 0; i < 2; ++i) {
        mesh = uniform_refine(mesh, CircleBoundary{{0.0, 0.0}, 0.5});
        validate_mesh(mesh);
    }
    CHECK(mesh_statistics(mesh).min_angle_deg >= 0.8 * base);  // frozen degrade factor
}

TEST_CASE("mesh text format round-trips exactly") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.15);
    std::stringstream buf;
    write_mesh(mesh, buf);
    const Mesh back = read_mesh(buf);
    REQUIRE(back.num_vertices() == mesh.num_vertices());
    REQUIRE(back.num_triangles() == mesh.num_triangles());
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        CHECK(back.vertices[i].x == mesh.vertices[i].x);  // 17 digits round-trip doubles
        CHECK(back.vertices[i].y == mesh.vertices[i].y);
    }
    CHECK(back.triangles == mesh.triangles);
    CHECK(back.boundary_edges == mesh.boundary_edges);
    CHECK(back.h == mesh.h);
}

TEST_SUITE_END();
