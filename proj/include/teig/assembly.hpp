#pragma once

#include <Eigen/SparseCore>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "teig/material.hpp"
#include "teig/mesh.hpp"

namespace teig {

using SparseReal = Eigen::SparseMatrix<double>;
using VectorC = Eigen::VectorXcd;

// Every matrix the eigenvalue search needs, assembled once per (mesh,
// material) pair with linear Lagrange elements:
//   stiffness          (A grad u, grad v)
//   stiffness_ref      (grad u, grad v)
//   mass_n             (n u, v)
//   mass               (u, v)
//   boundary_mass      <u, v> on the boundary, on the full index set
//   boundary_coupling  N x NB block mapping boundary coefficients to load
//                      vectors, <w_b, v>; nonzero only in boundary rows
// Dofs coincide with mesh vertices; boundary dofs are the trailing block,
// so boundary slot b corresponds to global dof N - NB + b.
struct DiscreteSystem {
    int N = 0;
    int NB = 0;
    std::vector<int> boundary_map;  // slot -> global dof index
    SparseReal stiffness;
    SparseReal stiffness_ref;
    SparseReal mass_n;
    SparseReal mass;
    SparseReal boundary_mass;       // N x N
    SparseReal boundary_coupling;   // N x NB
    double mesh_h = 0.0;
    double ellipticity_min = 0.0;   // smallest A eigenvalue seen at quadrature points
    double n_min = 0.0;             // smallest n value seen at quadrature points
};

// Raised when the medium loses positivity at a quadrature point.
class MaterialError : public std::runtime_error {
public:
    MaterialError(const std::string& what, Point2 where) : std::runtime_error(what), point(where) {}
    Point2 point;
};

DiscreteSystem assemble_system(const Mesh& mesh, const MaterialModel& material);

// Degree-2 exact 3-point rule (edge midpoints) on a triangle.
double integrate_triangle(Point2 a, Point2 b, Point2 c, const std::function<double(Point2)>& f);

// 2-point Gauss rule along a segment.
std::complex<double> integrate_edge_gauss2(Point2 a, Point2 b,
                                           const std::function<std::complex<double>(Point2)>& f);

// L2 boundary projection of g onto the boundary trace space: solves the
// boundary mass system with right side <g, v> from 2-point Gauss quadrature.
VectorC boundary_projection(const DiscreteSystem& sys, const Mesh& mesh,
                            const std::function<std::complex<double>(Point2)>& g);

// Same, for data that depends on the outward normal (conormal/Robin data,
// discontinuous at polygon corners). The normal passed to g is the unit
// outward normal of the boundary edge containing the quadrature point.
VectorC boundary_projection(const DiscreteSystem& sys, const Mesh& mesh,
                            const std::function<std::complex<double>(Point2, Point2)>& g);

// Coordinate text format (row col value per line, 0-based), for
// cross-checking against independent implementations.
void export_matrix_coords(const SparseReal& m, std::ostream& out);
void export_matrix_coords(const SparseReal& m, const std::string& path);

}  // namespace teig
