#pragma once

#include <array>
#include <functional>
#include <string>

#include "teig/geometry.hpp"

namespace teig {

// Symmetric 2x2 coefficient stored as (a11, a12, a22).
using SymMat2 = std::array<double, 3>;

inline double sym2_min_eigenvalue(const SymMat2& m) {
    const double tr = m[0] + m[2];
    const double det = m[0] * m[2] - m[1] * m[1];
    const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
    return tr / 2.0 - disc;
}

// Coefficient pair of the medium: matrix field A(x) and scalar field n(x).
// Both must stay uniformly positive (definite) on the domain; assembly
// checks this at every quadrature point it visits.
struct MaterialModel {
    std::function<SymMat2(Point2)> A;
    std::function<double(Point2)> n;
    std::string label;
};

// Built-in media used by the experiments and tests.
MaterialModel material_reference();                     // A = I, n = 1
MaterialModel material_isotropic_n16();                 // A = I, n = 16
MaterialModel material_aniso_A1();                      // A = diag(1/2, 1/8), n = 1
MaterialModel material_aniso_A2();                      // A = diag((x^2+y^2)/2, (2-x^2-y^2)/8), n = 1

// Lookup by preset name; throws std::invalid_argument for unknown names.
MaterialModel material_preset(const std::string& name);

}  // namespace teig
