#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <complex>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

namespace teig {

using Complex = std::complex<double>;
using ComplexSparse = Eigen::SparseMatrix<Complex>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// Signals a numerically singular factorization or solve. When the system
// came from a spectral-parameter evaluation the offending eta is attached.
class SingularSystemError : public std::runtime_error {
public:
    explicit SingularSystemError(const std::string& what, std::optional<Complex> eta = std::nullopt)
        : std::runtime_error(what), eta_context(eta) {}
    std::optional<Complex> eta_context;
};

// Sparse LU of a complex square matrix, reusable for many right-hand sides.
// Immutable after construction; concurrent solves are safe.
class SparseFactorization {
public:
    // Factorizes a copy of the matrix. Throws SingularSystemError on a
    // numerically singular pivot, carrying eta_context if provided.
    static std::shared_ptr<const SparseFactorization> create(const ComplexSparse& matrix,
                                                             std::optional<Complex> eta_context = std::nullopt);

    VectorXc solve(const VectorXc& rhs) const;
    MatrixXc solve_block(const MatrixXc& rhs) const;

    // 1-norm condition estimate (Hager-style, a handful of extra solves).
    double condition_estimate() const;

    double relative_residual(const VectorXc& rhs, const VectorXc& x) const;
    int dimension() const { return static_cast<int>(matrix_.rows()); }
    const ComplexSparse& matrix() const { return matrix_; }

private:
    SparseFactorization() = default;
    ComplexSparse matrix_;
    Eigen::SparseLU<ComplexSparse> lu_;
};

struct DenseSolveResult {
    VectorXc x;
    double rcond = 0.0;  // reciprocal condition estimate from the LU
};

// Partial-pivoting dense solve. Throws SingularSystemError when the matrix
// is singular to working precision (callers near an eigenvalue treat this
// as "indicator infinite").
DenseSolveResult dense_solve(const MatrixXc& matrix, const VectorXc& rhs,
                             std::optional<Complex> eta_context = std::nullopt);

// Structural sanity check for pencil matrices: square with a structurally
// symmetric pattern. Throws std::invalid_argument otherwise.
void check_structurally_symmetric(const ComplexSparse& m);

}  // namespace teig
