#include <doctest.h>

#include <random>

#include "teig/assembly.hpp"
#include "teig/boundary_operator.hpp"
#include "teig/linsolve.hpp"

using namespace teig;

namespace {

ComplexSparse from_dense(const MatrixXc& d) {
    ComplexSparse s(d.rows(), d.cols());
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int i = 0; i < d.rows(); ++i)
        for (int j = 0; j < d.cols(); ++j)
            if (d(i, j) != Complex(0, 0)) trips.emplace_back(i, j, d(i, j));
    s.setFromTriplets(trips.begin(), trips.end());
    return s;
}

VectorXc seeded_vector(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorXc v(n);
    for (int i = 0; i < n; ++i) v[i] = Complex(u(rng), u(rng));
    return v;
}

}  // namespace

TEST_SUITE_BEGIN("linsolve");

TEST_CASE("identity and small analytic sparse solves") {
    MatrixXc eye = MatrixXc::Identity(4, 4);
    auto fact = SparseFactorization::create(from_dense(eye));
    const VectorXc b = seeded_vector(4, 1);
    CHECK((fact->solve(b) - b).norm() < 1e-14);

    MatrixXc m(2, 2);
    m << Complex(2, 0), Complex(1, 0), Complex(1, 0), Complex(2, 0);
    auto fact2 = SparseFactorization::create(from_dense(m));
    VectorXc rhs(2);
    rhs << Complex(3, 0), Complex(3, 0);
    const VectorXc x = fact2->solve(rhs);
    CHECK(std::abs(x[0] - Complex(1, 0)) < 1e-14);
    CHECK(std::abs(x[1] - Complex(1, 0)) < 1e-14);
}

TEST_CASE("zero right side, linearity, determinism") {
    const Mesh mesh = generate_diamond_mesh(1.0, 0.25);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const ComplexSparse robin = sys.stiffness.cast<Complex>() -
                                Complex(0, 1) * sys.boundary_mass.cast<Complex>() -
                                Complex(4.0, 0) * sys.mass_n.cast<Complex>();
    check_structurally_symmetric(robin);
    auto fact = SparseFactorization::create(robin, Complex(4.0, 0.0));

    CHECK(fact->solve(VectorXc(VectorXc::Zero(sys.N))).norm() == 0.0);

    const VectorXc b1 = seeded_vector(sys.N, 2), b2 = seeded_vector(sys.N, 3);
    const Complex alpha(0.7, -0.3);
    const VectorXc lhs = fact->solve(VectorXc(alpha * b1 + b2));
    const VectorXc rhs = alpha * fact->solve(b1) + fact->solve(b2);
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);

    const VectorXc xa = fact->solve(b1);
    const VectorXc xb = fact->solve(b1);
    CHECK(xa == xb);  // bitwise identical repeated solves
}

TEST_CASE("residual contract on the Robin-Helmholtz matrix at eta = 4") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const ComplexSparse robin = sys.stiffness.cast<Complex>() -
                                Complex(0, 1) * sys.boundary_mass.cast<Complex>() -
                                Complex(4.0, 0) * sys.mass_n.cast<Complex>();
    auto fact = SparseFactorization::create(robin, Complex(4.0, 0.0));
    for (unsigned seed = 0; seed < 10; ++seed) {
        const VectorXc b = seeded_vector(sys.N, 100 + seed);
        const VectorXc x = fact->solve(b);
        CHECK(fact->relative_residual(b, x) < 1e-10);
    }
}

TEST_CASE("dimension mismatches are rejected") {
    auto fact = SparseFactorization::create(from_dense(MatrixXc::Identity(3, 3)));
    CHECK_THROWS_AS(fact->solve(VectorXc(VectorXc::Zero(5))), std::invalid_argument);
    CHECK_THROWS_AS(dense_solve(MatrixXc::Identity(3, 3), VectorXc::Zero(2)), std::invalid_argument);
}

TEST_CASE("dense solves: identity, 1x1, singular") {
    const VectorXc b = seeded_vector(6, 4);
    const DenseSolveResult r = dense_solve(MatrixXc::Identity(6, 6), b);
    CHECK((r.x - b).norm() < 1e-15);
    CHECK(r.rcond == doctest::Approx(1.0));

    MatrixXc one(1, 1);
    one << Complex(2, 0);
    VectorXc rhs1(1);
    rhs1 << Complex(4, 0);
    CHECK(std::abs(dense_solve(one, rhs1).x[0] - Complex(2, 0)) < 1e-15);

    MatrixXc sing = MatrixXc::Zero(3, 3);
    sing(0, 0) = 1.0;  // rank deficient
    CHECK_THROWS_AS(dense_solve(sing, seeded_vector(3, 5)), SingularSystemError);
}

TEST_CASE("condition estimate tracks an explicitly computed condition number") {
    const int n = 8;
    MatrixXc hilbert(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) hilbert(i, j) = Complex(1.0 / (i + j + 1), 0.0);
    auto fact = SparseFactorization::create(from_dense(hilbert));
    const double est = fact->condition_estimate();
    CHECK(est > 1e8);

    // explicit 1-norm condition number from the dense inverse
    const MatrixXc inv = hilbert.inverse();
    auto norm1 = [](const MatrixXc& m) {
        double best = 0.0;
        for (int j = 0; j < m.cols(); ++j) best = std::max(best, m.col(j).cwiseAbs().sum());
        return best;
    };
    const double exact = norm1(hilbert) * norm1(inv);
    CHECK(est >= 0.01 * exact);
    CHECK(est <= 100.0 * exact);
}

TEST_CASE("structural symmetry check rejects one-sided patterns") {
    MatrixXc bad = MatrixXc::Identity(3, 3);
    bad(0, 2) = 1.0;
    CHECK_THROWS_AS(check_structurally_symmetric(from_dense(bad)), std::invalid_argument);
}

TEST_SUITE_END();
