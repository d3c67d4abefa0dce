#pragma once

#include <memory>

#include "teig/assembly.hpp"
#include "teig/linsolve.hpp"

namespace teig {

// Reporting convention for spectral values: k (wavenumber) or eta = k^2.
// The operator itself is always evaluated in eta.
enum class SpectralMode { k, eta };

inline Complex spectral_to_eta(Complex z, SpectralMode mode) {
    return mode == SpectralMode::k ? z * z : z;
}

const char* spectral_mode_name(SpectralMode mode);
SpectralMode spectral_mode_from_name(const std::string& name);

enum class RobinSystem { anisotropic, reference };

// Solution of the Robin-Helmholtz system
//   (stiffness - i boundary_mass - eta mass) u = boundary_coupling g,
// with the anisotropic (A, n) or reference (I, 1) coefficients. Unique for
// Im eta >= 0; other eta rely on analytic continuation and may hit a
// singular factorization, reported via SingularSystemError.
VectorXc helmholtz_solve(const DiscreteSystem& sys, RobinSystem which, Complex eta, const VectorXc& g);

// Dense boundary operator at one spectral point: the boundary-mass-weighted
// difference of the two Robin-to-Dirichlet solves,
//   T = C^t (S1(eta)^{-1} - S0(eta)^{-1}) C,   C = boundary_coupling.
// Vanishes identically when the medium equals the reference medium.
struct OperatorEvaluation {
    Complex eta;
    MatrixXc T;  // NB x NB
    std::shared_ptr<const SparseFactorization> factorization_aniso;
    std::shared_ptr<const SparseFactorization> factorization_ref;
    double cond_estimate = 0.0;        // condition estimate of dense T
    bool analytic_continuation = false;  // Im eta < 0
    std::shared_ptr<const Eigen::PartialPivLU<MatrixXc>> lu;  // of T
};

// Two sparse factorizations plus 2*NB triangular solves.
OperatorEvaluation build_T(const DiscreteSystem& sys, Complex eta);

// Dense solve of T x = f; optionally reports the reciprocal condition.
// Throws SingularSystemError when eta sits on an eigenvalue of T_h.
VectorXc apply_T_inverse(const OperatorEvaluation& eval, const VectorXc& f, double* rcond = nullptr);

// Resolvent engine for the search: solves T(eta) X = F without forming T,
// through one sparse factorization of the coupled system
//   [ S1(eta)   0      -C  ] [u1]   [0]
//   [ 0         S0(eta)-C  ] [u0] = [0]
//   [ C^t      -C^t     0  ] [x ]   [F]
// whose last block row states C^t(u1 - u0) = F, i.e. T(eta) x = F. The
// elimination of u1, u0 reproduces exactly the dense system build_T would
// solve (covered by tests), at a fraction of the cost per spectral point.
//
// One instance per thread: the sparsity pattern is analyzed once and value
// updates are done in place. The referenced DiscreteSystem must outlive it.
class ResolventSolver {
public:
    explicit ResolventSolver(const DiscreteSystem& sys);

    // Columns of F are independent probes. Throws SingularSystemError if
    // eta is (numerically) an eigenvalue of either Robin system or of T_h.
    MatrixXc solve(Complex eta, const MatrixXc& rhs);

    int boundary_dim() const { return nb_; }

private:
    int n_ = 0, nb_ = 0;
    ComplexSparse work_;                 // coupled matrix, pattern fixed
    Eigen::VectorXcd base_values_;       // eta-independent part of work_
    Eigen::VectorXcd mass_values_;       // coefficient of -eta
    Eigen::SparseLU<ComplexSparse> lu_;
    bool pattern_analyzed_ = false;
};

}  // namespace teig
