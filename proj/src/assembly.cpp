#include "teig/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace teig {

namespace {

struct ElementGeometry {
    double area;
    double gx[3], gy[3];  // constant P1 basis gradients
};

ElementGeometry element_geometry(Point2 a, Point2 b, Point2 c) {
    ElementGeometry g;
    const double twice = cross2(a, b, c);
    g.area = 0.5 * twice;
    // grad of barycentric coordinate i is perpendicular to the opposite edge
    g.gx[0] = (b.y - c.y) / twice;
    g.gy[0] = (c.x - b.x) / twice;
    g.gx[1] = (c.y - a.y) / twice;
    g.gy[1] = (a.x - c.x) / twice;
    g.gx[2] = (a.y - b.y) / twice;
    g.gy[2] = (b.x - a.x) / twice;
    return g;
}

// P1 basis values at the three edge midpoints (quadrature points).
// Midpoint q sits on the edge between vertices q and (q+1)%3.
constexpr double kMidpointBasis[3][3] = {
    {0.5, 0.5, 0.0},
    {0.0, 0.5, 0.5},
    {0.5, 0.0, 0.5},
};

}  // namespace

DiscreteSystem assemble_system(const Mesh& mesh, const MaterialModel& material) {
    validate_mesh(mesh);

    DiscreteSystem sys;
    sys.N = mesh.num_vertices();
    sys.NB = mesh.num_boundary();
    sys.boundary_map = mesh.boundary_vertices;
    sys.mesh_h = mesh.h;
    sys.ellipticity_min = std::numeric_limits<double>::infinity();
    sys.n_min = std::numeric_limits<double>::infinity();

    const MaterialModel ref = material_reference();

    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> t_stiff, t_stiff_ref, t_mass_n, t_mass;
    const size_t per_tri = mesh.triangles.size() * 9;
    t_stiff.reserve(per_tri);
    t_stiff_ref.reserve(per_tri);
    t_mass_n.reserve(per_tri);
    t_mass.reserve(per_tri);

    auto accumulate_element = [](std::vector<Trip>& stiff, std::vector<Trip>& mass_w,
                                 const std::array<int, 3>& tri, const ElementGeometry& g,
                                 const Point2 quad[3], const MaterialModel& mat,
                                 double* ellip_min, double* n_min) {
        double ke[3][3] = {};
        double me[3][3] = {};
        const double w = g.area / 3.0;
        for (int q = 0; q < 3; ++q) {
            const SymMat2 A = mat.A(quad[q]);
            const double nv = mat.n(quad[q]);
            const double lam = sym2_min_eigenvalue(A);
            if (ellip_min) {
                if (!(lam > 0.0)) {
                    std::ostringstream os;
                    os << "material " << mat.label << ": A(x) not positive definite at ("
                       << quad[q].x << ", " << quad[q].y << "), min eigenvalue " << lam;
                    throw MaterialError(os.str(), quad[q]);
                }
                *ellip_min = std::min(*ellip_min, lam);
            }
            if (n_min) {
                if (!(nv > 0.0)) {
                    std::ostringstream os;
                    os << "material " << mat.label << ": n(x) not positive at ("
                       << quad[q].x << ", " << quad[q].y << "), value " << nv;
                    throw MaterialError(os.str(), quad[q]);
                }
                *n_min = std::min(*n_min, nv);
            }
            for (int i = 0; i < 3; ++i) {
                const double Agx = A[0] * g.gx[i] + A[1] * g.gy[i];
                const double Agy = A[1] * g.gx[i] + A[2] * g.gy[i];
                for (int j = 0; j < 3; ++j) {
                    ke[i][j] += w * (Agx * g.gx[j] + Agy * g.gy[j]);
                    me[i][j] += w * nv * kMidpointBasis[q][i] * kMidpointBasis[q][j];
                }
            }
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                stiff.emplace_back(tri[i], tri[j], ke[i][j]);
                mass_w.emplace_back(tri[i], tri[j], me[i][j]);
            }
    };

    for (const auto& tri : mesh.triangles) {
        const Point2 a = mesh.vertices[tri[0]];
        const Point2 b = mesh.vertices[tri[1]];
        const Point2 c = mesh.vertices[tri[2]];
        const ElementGeometry g = element_geometry(a, b, c);
        const Point2 quad[3] = {midpoint(a, b), midpoint(b, c), midpoint(c, a)};
        accumulate_element(t_stiff, t_mass_n, tri, g, quad, material, &sys.ellipticity_min, &sys.n_min);
        accumulate_element(t_stiff_ref, t_mass, tri, g, quad, ref, nullptr, nullptr);
    }

    std::vector<Trip> t_bmass, t_bcoup;
    t_bmass.reserve(mesh.boundary_edges.size() * 4);
    t_bcoup.reserve(mesh.boundary_edges.size() * 4);
    const int slot_base = sys.N - sys.NB;
    for (const auto& e : mesh.boundary_edges) {
        const double len = dist(mesh.vertices[e[0]], mesh.vertices[e[1]]);
        const double d = len / 3.0, o = len / 6.0;  // exact P1 segment mass
        const int v[2] = {e[0], e[1]};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                const double val = (i == j) ? d : o;
                t_bmass.emplace_back(v[i], v[j], val);
                t_bcoup.emplace_back(v[i], v[j] - slot_base, val);
            }
    }

    auto build = [&](std::vector<Trip>& trips, int rows, int cols) {
        SparseReal m(rows, cols);
        m.setFromTriplets(trips.begin(), trips.end());
        m.makeCompressed();
        return m;
    };
    sys.stiffness = build(t_stiff, sys.N, sys.N);
    sys.stiffness_ref = build(t_stiff_ref, sys.N, sys.N);
    sys.mass_n = build(t_mass_n, sys.N, sys.N);
    sys.mass = build(t_mass, sys.N, sys.N);
    sys.boundary_mass = build(t_bmass, sys.N, sys.N);
    sys.boundary_coupling = build(t_bcoup, sys.N, sys.NB);
    return sys;
}

double integrate_triangle(Point2 a, Point2 b, Point2 c, const std::function<double(Point2)>& f) {
    const double area = std::abs(triangle_area(a, b, c));
    return area / 3.0 * (f(midpoint(a, b)) + f(midpoint(b, c)) + f(midpoint(c, a)));
}

std::complex<double> integrate_edge_gauss2(Point2 a, Point2 b,
                                           const std::function<std::complex<double>(Point2)>& f) {
    const double len = dist(a, b);
    const double s = 0.5 / std::sqrt(3.0);
    const Point2 m = midpoint(a, b);
    const Point2 d = b - a;
    const Point2 q0 = {m.x - s * d.x, m.y - s * d.y};
    const Point2 q1 = {m.x + s * d.x, m.y + s * d.y};
    return 0.5 * len * (f(q0) + f(q1));
}

VectorC boundary_projection(const DiscreteSystem& sys, const Mesh& mesh,
                            const std::function<std::complex<double>(Point2)>& g) {
    return boundary_projection(sys, mesh, [&g](Point2 p, Point2) { return g(p); });
}

VectorC boundary_projection(const DiscreteSystem& sys, const Mesh& mesh,
                            const std::function<std::complex<double>(Point2, Point2)>& g) {
    const int base = sys.N - sys.NB;
    VectorC rhs = VectorC::Zero(sys.NB);
    for (const auto& e : mesh.boundary_edges) {
        const Point2 a = mesh.vertices[e[0]];
        const Point2 b = mesh.vertices[e[1]];
        const double len = dist(a, b);
        const Point2 normal{(b.y - a.y) / len, -(b.x - a.x) / len};  // domain lies left of a->b
        // <g, phi> with phi linear along the edge
        const auto phi0 = [&](Point2 p) {
            const double t = dist(p, b) / len;
            return g(p, normal) * t;
        };
        const auto phi1 = [&](Point2 p) {
            const double t = dist(p, a) / len;
            return g(p, normal) * t;
        };
        rhs[e[0] - base] += integrate_edge_gauss2(a, b, phi0);
        rhs[e[1] - base] += integrate_edge_gauss2(a, b, phi1);
    }

    // boundary block of the boundary mass (SPD, tridiagonal-cyclic)
    SparseReal bm(sys.NB, sys.NB);
    {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(sys.NB * 4);
        for (const auto& e : mesh.boundary_edges) {
            const double len = dist(mesh.vertices[e[0]], mesh.vertices[e[1]]);
            const int i = e[0] - base, j = e[1] - base;
            trips.emplace_back(i, i, len / 3.0);
            trips.emplace_back(j, j, len / 3.0);
            trips.emplace_back(i, j, len / 6.0);
            trips.emplace_back(j, i, len / 6.0);
        }
        bm.setFromTriplets(trips.begin(), trips.end());
    }
    Eigen::SimplicialLDLT<SparseReal> chol(bm);
    if (chol.info() != Eigen::Success)
        throw std::runtime_error("boundary_projection: boundary mass factorization failed");
    Eigen::VectorXd re = chol.solve(rhs.real());
    Eigen::VectorXd im = chol.solve(rhs.imag());
    VectorC out(sys.NB);
    out.real() = re;
    out.imag() = im;
    return out;
}

void export_matrix_coords(const SparseReal& m, std::ostream& out) {
    out << std::setprecision(17);
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseReal::InnerIterator it(m, k); it; ++it)
            out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

void export_matrix_coords(const SparseReal& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open matrix file for writing: " + path);
    export_matrix_coords(m, out);
}

}  // namespace teig
