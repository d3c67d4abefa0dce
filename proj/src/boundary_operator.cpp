#include "teig/boundary_operator.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <stdexcept>
#include <vector>

namespace teig {

namespace {

constexpr Complex kImagUnit{0.0, 1.0};

ComplexSparse robin_matrix(const DiscreteSystem& sys, RobinSystem which, Complex eta) {
    const SparseReal& stiff = which == RobinSystem::anisotropic ? sys.stiffness : sys.stiffness_ref;
    const SparseReal& mass = which == RobinSystem::anisotropic ? sys.mass_n : sys.mass;
    return stiff.cast<Complex>() - kImagUnit * sys.boundary_mass.cast<Complex>() -
           eta * mass.cast<Complex>();
}

}  // namespace

const char* spectral_mode_name(SpectralMode mode) { return mode == SpectralMode::k ? "k" : "eta"; }

SpectralMode spectral_mode_from_name(const std::string& name) {
    if (name == "k") return SpectralMode::k;
    if (name == "eta") return SpectralMode::eta;
    throw std::invalid_argument("unknown spectral convention: " + name + " (expected k or eta)");
}

VectorXc helmholtz_solve(const DiscreteSystem& sys, RobinSystem which, Complex eta, const VectorXc& g) {
    if (g.size() != sys.NB)
        throw std::invalid_argument("helmholtz_solve: boundary datum has wrong length");
    const auto fact = SparseFactorization::create(robin_matrix(sys, which, eta), eta);
    const VectorXc rhs = sys.boundary_coupling.cast<Complex>() * g;
    return fact->solve(rhs);
}

OperatorEvaluation build_T(const DiscreteSystem& sys, Complex eta) {
    OperatorEvaluation eval;
    eval.eta = eta;
    eval.analytic_continuation = eta.imag() < 0.0;
    eval.factorization_aniso = SparseFactorization::create(robin_matrix(sys, RobinSystem::anisotropic, eta), eta);
    eval.factorization_ref = SparseFactorization::create(robin_matrix(sys, RobinSystem::reference, eta), eta);

    const ComplexSparse coupling = sys.boundary_coupling.cast<Complex>();
    eval.T = MatrixXc::Zero(sys.NB, sys.NB);
    const int chunk = 64;  // bounds the dense scratch to N x 64
    for (int j0 = 0; j0 < sys.NB; j0 += chunk) {
        const int m = std::min(chunk, sys.NB - j0);
        const MatrixXc rhs = coupling.middleCols(j0, m).toDense();
        const MatrixXc diff = eval.factorization_aniso->solve_block(rhs) - eval.factorization_ref->solve_block(rhs);
        eval.T.middleCols(j0, m) = coupling.transpose() * diff;
    }

    auto lu = std::make_shared<Eigen::PartialPivLU<MatrixXc>>(eval.T);
    const double rcond = lu->rcond();
    eval.cond_estimate = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    eval.lu = std::move(lu);
    return eval;
}

VectorXc apply_T_inverse(const OperatorEvaluation& eval, const VectorXc& f, double* rcond) {
    if (f.size() != eval.T.rows())
        throw std::invalid_argument("apply_T_inverse: probe has wrong length");
    const double rc = eval.lu->rcond();
    if (rcond) *rcond = rc;
    VectorXc x = eval.lu->solve(f);
    if (!(rc > 0.0) || !x.allFinite())
        throw SingularSystemError("apply_T_inverse: operator is singular at this eta", eval.eta);
    return x;
}

ResolventSolver::ResolventSolver(const DiscreteSystem& sys) : n_(sys.N), nb_(sys.NB) {
    const int dim = 2 * n_ + nb_;

    // Base and eta-coefficient triplets share one position list so the two
    // compressed matrices (and work_) have identical storage layouts.
    std::vector<Eigen::Triplet<Complex>> base, mass;
    const size_t guess = 2 * (sys.stiffness.nonZeros() + sys.mass_n.nonZeros()) +
                         4 * sys.boundary_coupling.nonZeros() + sys.boundary_mass.nonZeros() * 2 + nb_;
    base.reserve(guess);
    mass.reserve(guess);
    auto push = [&](int r, int c, Complex b, Complex m) {
        base.emplace_back(r, c, b);
        mass.emplace_back(r, c, m);
    };

    auto push_block = [&](const SparseReal& mat, int roff, int coff, Complex scale, bool as_mass) {
        for (int k = 0; k < mat.outerSize(); ++k)
            for (SparseReal::InnerIterator it(mat, k); it; ++it) {
                const Complex v = scale * it.value();
                if (as_mass)
                    push(roff + static_cast<int>(it.row()), coff + static_cast<int>(it.col()), Complex(0), v);
                else
                    push(roff + static_cast<int>(it.row()), coff + static_cast<int>(it.col()), v, Complex(0));
            }
    };

    push_block(sys.stiffness, 0, 0, Complex(1), false);
    push_block(sys.boundary_mass, 0, 0, -kImagUnit, false);
    push_block(sys.mass_n, 0, 0, Complex(1), true);

    push_block(sys.stiffness_ref, n_, n_, Complex(1), false);
    push_block(sys.boundary_mass, n_, n_, -kImagUnit, false);
    push_block(sys.mass, n_, n_, Complex(1), true);

    for (int k = 0; k < sys.boundary_coupling.outerSize(); ++k)
        for (SparseReal::InnerIterator it(sys.boundary_coupling, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            const Complex v(it.value());
            push(r, 2 * n_ + c, -v, Complex(0));         // -C in the u1 rows
            push(n_ + r, 2 * n_ + c, -v, Complex(0));    // -C in the u0 rows
            push(2 * n_ + c, r, v, Complex(0));          // C^t
            push(2 * n_ + c, n_ + r, -v, Complex(0));    // -C^t
        }
    for (int b = 0; b < nb_; ++b) push(2 * n_ + b, 2 * n_ + b, Complex(0), Complex(0));

    ComplexSparse base_m(dim, dim), mass_m(dim, dim);
    base_m.setFromTriplets(base.begin(), base.end());
    mass_m.setFromTriplets(mass.begin(), mass.end());
    base_m.makeCompressed();
    mass_m.makeCompressed();

    work_ = base_m;
    const auto nnz = work_.nonZeros();
    base_values_ = Eigen::Map<const Eigen::VectorXcd>(base_m.valuePtr(), nnz);
    mass_values_ = Eigen::Map<const Eigen::VectorXcd>(mass_m.valuePtr(), nnz);
}

MatrixXc ResolventSolver::solve(Complex eta, const MatrixXc& rhs) {
    if (rhs.rows() != nb_)
        throw std::invalid_argument("ResolventSolver::solve: probe block has wrong row count");
    Eigen::Map<Eigen::VectorXcd>(work_.valuePtr(), work_.nonZeros()) = base_values_ - eta * mass_values_;

    if (!pattern_analyzed_) {
        lu_.analyzePattern(work_);
        pattern_analyzed_ = true;
    }
    lu_.factorize(work_);
    if (lu_.info() != Eigen::Success)
        throw SingularSystemError("resolvent solve: coupled system singular", eta);

    const int dim = 2 * n_ + nb_;
    MatrixXc full = MatrixXc::Zero(dim, rhs.cols());
    full.bottomRows(nb_) = rhs;
    const MatrixXc sol = lu_.solve(full);
    if (!sol.allFinite())
        throw SingularSystemError("resolvent solve: non-finite solution", eta);

    // The factorization can succeed numerically arbitrarily close to an
    // eigenvalue; a residual check catches the meaningless solves.
    const double rhs_norm = full.col(0).norm();
    if (rhs_norm > 0.0) {
        const double res = (work_ * sol.col(0) - full.col(0)).norm() / rhs_norm;
        if (!(res < 1e-6))
            throw SingularSystemError("resolvent solve: residual too large (eta at eigenvalue?)", eta);
    }
    return sol.bottomRows(nb_);
}

}  // namespace teig
