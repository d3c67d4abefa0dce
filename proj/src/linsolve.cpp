#include "teig/linsolve.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <sstream>
#include <unordered_set>

namespace teig {

namespace {

std::string eta_suffix(const std::optional<Complex>& eta) {
    if (!eta) return {};
    std::ostringstream os;
    os << " (eta = " << eta->real() << (eta->imag() < 0 ? " - " : " + ") << std::abs(eta->imag()) << "i)";
    return os.str();
}

}  // namespace

std::shared_ptr<const SparseFactorization> SparseFactorization::create(const ComplexSparse& matrix,
                                                                       std::optional<Complex> eta_context) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("factorize: matrix must be square");
    auto fact = std::shared_ptr<SparseFactorization>(new SparseFactorization());
    fact->matrix_ = matrix;
    fact->matrix_.makeCompressed();
    fact->lu_.compute(fact->matrix_);
    if (fact->lu_.info() != Eigen::Success)
        throw SingularSystemError("factorize: numerically singular system" + eta_suffix(eta_context),
                                  eta_context);
    return fact;
}

VectorXc SparseFactorization::solve(const VectorXc& rhs) const {
    if (rhs.size() != matrix_.rows())
        throw std::invalid_argument("solve: right-hand side dimension mismatch");
    return lu_.solve(rhs);
}

MatrixXc SparseFactorization::solve_block(const MatrixXc& rhs) const {
    if (rhs.rows() != matrix_.rows())
        throw std::invalid_argument("solve: right-hand side dimension mismatch");
    return lu_.solve(rhs);
}

double SparseFactorization::relative_residual(const VectorXc& rhs, const VectorXc& x) const {
    const double denom = rhs.norm();
    if (denom == 0.0) return x.norm() == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return (matrix_ * x - rhs).norm() / denom;
}

double SparseFactorization::condition_estimate() const {
    const int n = dimension();
    double norm_a = 0.0;  // 1-norm: max column sum
    for (int k = 0; k < matrix_.outerSize(); ++k) {
        double col = 0.0;
        for (ComplexSparse::InnerIterator it(matrix_, k); it; ++it) col += std::abs(it.value());
        norm_a = std::max(norm_a, col);
    }

    // Hager's estimator for ||A^{-1}||_1 using solves with A and A^*.
    Eigen::SparseLU<ComplexSparse> lu_adj;
    lu_adj.compute(ComplexSparse(matrix_.adjoint()));
    if (lu_adj.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

    VectorXc x = VectorXc::Constant(n, Complex(1.0 / n, 0.0));
    double est = 0.0;
    std::unordered_set<int> visited;
    for (int iter = 0; iter < 5; ++iter) {
        const VectorXc y = lu_.solve(x);
        est = y.lpNorm<1>();
        VectorXc xi(n);
        for (int i = 0; i < n; ++i) {
            const double m = std::abs(y[i]);
            xi[i] = m > 0.0 ? y[i] / m : Complex(1.0, 0.0);
        }
        const VectorXc z = lu_adj.solve(xi);
        int j = 0;
        double zmax = -1.0;
        for (int i = 0; i < n; ++i)
            if (std::abs(z[i]) > zmax) {
                zmax = std::abs(z[i]);
                j = i;
            }
        if (zmax <= std::abs(z.dot(x)) || visited.count(j)) break;
        visited.insert(j);
        x.setZero();
        x[j] = 1.0;
    }
    return norm_a * est;
}

DenseSolveResult dense_solve(const MatrixXc& matrix, const VectorXc& rhs,
                             std::optional<Complex> eta_context) {
    if (matrix.rows() != matrix.cols())
        throw std::invalid_argument("dense_solve: matrix must be square");
    if (rhs.size() != matrix.rows())
        throw std::invalid_argument("dense_solve: right-hand side dimension mismatch");
    Eigen::PartialPivLU<MatrixXc> lu(matrix);
    DenseSolveResult res;
    res.rcond = lu.rcond();
    res.x = lu.solve(rhs);
    if (!(res.rcond > 0.0) || !res.x.allFinite())
        throw SingularSystemError("dense_solve: singular matrix" + eta_suffix(eta_context), eta_context);
    return res;
}

void check_structurally_symmetric(const ComplexSparse& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix is not square");
    std::unordered_set<uint64_t> pattern;
    pattern.reserve(m.nonZeros());
    for (int k = 0; k < m.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(m, k); it; ++it)
            pattern.insert((static_cast<uint64_t>(it.row()) << 32) | static_cast<uint64_t>(it.col()));
    for (int k = 0; k < m.outerSize(); ++k)
        for (ComplexSparse::InnerIterator it(m, k); it; ++it)
            if (!pattern.count((static_cast<uint64_t>(it.col()) << 32) | static_cast<uint64_t>(it.row())))
                throw std::invalid_argument("matrix pattern is not structurally symmetric");
}

}  // namespace teig
