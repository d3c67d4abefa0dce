#include <doctest.h>

#include <cmath>
#include <numbers>

#include "teig/boundary_operator.hpp"
#include "teig/search.hpp"

using namespace teig;
using cd = std::complex<double>;

namespace {

// Robin datum of the plane wave exp(i k x) for the reference medium.
VectorXc plane_wave_data(const DiscreteSystem& sys, const Mesh& mesh, double k) {
    return boundary_projection(sys, mesh, [k](Point2 p, Point2 nrm) {
        const cd u = std::exp(cd(0, k * p.x));
        const cd ux = cd(0, k) * u;
        return ux * nrm.x - cd(0, 1) * u;
    });
}

double boundary_l2_error(const Mesh& mesh, const VectorXc& u_h, double k) {
    double err2 = 0.0;
    const double gt[3] = {0.5 - std::sqrt(3.0 / 20.0), 0.5, 0.5 + std::sqrt(3.0 / 20.0)};
    const double gw[3] = {5.0 / 18, 8.0 / 18, 5.0 / 18};
    for (const auto& e : mesh.boundary_edges) {
        const Point2 a = mesh.vertices[e[0]], b = mesh.vertices[e[1]];
        const double len = dist(a, b);
        for (int q = 0; q < 3; ++q) {
            const Point2 p{a.x + gt[q] * (b.x - a.x), a.y + gt[q] * (b.y - a.y)};
            const cd uh = u_h[e[0]] + gt[q] * (u_h[e[1]] - u_h[e[0]]);
            err2 += gw[q] * len * std::norm(uh - std::exp(cd(0, k * p.x)));
        }
    }
    return std::sqrt(err2);
}

// H1 error against the exact plane wave, degree-5 quadrature per triangle.
double h1_error(const Mesh& mesh, const VectorXc& u_h, double k) {
    const double w0 = 9.0 / 40.0;
    const double wa = (155.0 + std::sqrt(15.0)) / 1200.0, wb = (155.0 - std::sqrt(15.0)) / 1200.0;
    const double a1 = (6.0 + std::sqrt(15.0)) / 21.0, a2 = (6.0 - std::sqrt(15.0)) / 21.0;
    struct QP {
        double l1, l2, l3, w;
    };
    const QP qps[7] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, w0}, {a1, a1, 1 - 2 * a1, wa},
                       {a1, 1 - 2 * a1, a1, wa},         {1 - 2 * a1, a1, a1, wa},
                       {a2, a2, 1 - 2 * a2, wb},         {a2, 1 - 2 * a2, a2, wb},
                       {1 - 2 * a2, a2, a2, wb}};
    double acc = 0.0;
    for (const auto& tri : mesh.triangles) {
        const Point2 A = mesh.vertices[tri[0]], B = mesh.vertices[tri[1]], C = mesh.vertices[tri[2]];
        const double area = triangle_area(A, B, C);
        const double tw = 2.0 * area;
        const double gx[3] = {(B.y - C.y) / tw, (C.y - A.y) / tw, (A.y - B.y) / tw};
        const double gy[3] = {(C.x - B.x) / tw, (A.x - C.x) / tw, (B.x - A.x) / tw};
        const cd uhx = u_h[tri[0]] * gx[0] + u_h[tri[1]] * gx[1] + u_h[tri[2]] * gx[2];
        const cd uhy = u_h[tri[0]] * gy[0] + u_h[tri[1]] * gy[1] + u_h[tri[2]] * gy[2];
        for (const auto& q : qps) {
            const Point2 p{q.l1 * A.x + q.l2 * B.x + q.l3 * C.x, q.l1 * A.y + q.l2 * B.y + q.l3 * C.y};
            const cd u = std::exp(cd(0, k * p.x));
            const cd uh = q.l1 * u_h[tri[0]] + q.l2 * u_h[tri[1]] + q.l3 * u_h[tri[2]];
            acc += q.w * 2.0 * area *
                   (std::norm(uhx - cd(0, k) * u) + std::norm(uhy) + std::norm(uh - u));
        }
    }
    return std::sqrt(acc);
}

double sigma_min_at(const DiscreteSystem& sys, double k) {
    const OperatorEvaluation eval = build_T(sys, cd(k * k, 0.0));
    Eigen::BDCSVD<MatrixXc> svd(eval.T);
    return svd.singularValues().tail(1)(0);
}

// Coarse scan + golden-section style shrink towards the sigma_min dip.
double locate_dip(const DiscreteSystem& sys, double lo, double hi, int coarse, int refines) {
    double best_k = lo, best = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= coarse; ++i) {
        const double k = lo + (hi - lo) * i / coarse;
        const double s = sigma_min_at(sys, k);
        if (s < best) {
            best = s;
            best_k = k;
        }
    }
    double step = (hi - lo) / coarse;
    for (int r = 0; r < refines; ++r) {
        for (const double k : {best_k - 0.5 * step, best_k + 0.5 * step}) {
            const double s = sigma_min_at(sys, k);
            if (s < best) {
                best = s;
                best_k = k;
            }
        }
        step *= 0.5;
    }
    return best_k;
}

}  // namespace

TEST_SUITE_BEGIN("operator");

TEST_CASE("constant manufactured solution is reproduced exactly") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_reference());
    const VectorXc g = VectorXc::Constant(sys.NB, cd(0.0, -1.0));
    const VectorXc u = helmholtz_solve(sys, RobinSystem::reference, cd(0.0, 0.0), g);
    CHECK((u - VectorXc::Ones(sys.N)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("plane-wave rates: O(h) in H1, at least the guaranteed 2^{3/2} on the trace") {
    const double k = 2.0;
    Mesh mesh = generate_disc_mesh(0.5, 0.1);
    double h1[3], tr[3];
    for (int l = 0; l < 3; ++l) {
        if (l) mesh = uniform_refine(mesh, CircleBoundary{{0, 0}, 0.5});
        const DiscreteSystem sys = assemble_system(mesh, material_reference());
        const VectorXc u = helmholtz_solve(sys, RobinSystem::reference, cd(k * k, 0.0),
                                           plane_wave_data(sys, mesh, k));
        h1[l] = h1_error(mesh, u, k);
        tr[l] = boundary_l2_error(mesh, u, k);
    }
    for (int l = 0; l + 1 < 3; ++l) {
        CHECK(h1[l] / h1[l + 1] > 1.7);  // O(h), measured ~2.0
        CHECK(h1[l] / h1[l + 1] < 2.4);
        CHECK(tr[l] / tr[l + 1] > 2.3);  // no worse than the h^{3/2} guarantee
    }
}

TEST_CASE("reference medium cancels the operator identically") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_reference());
    const VectorXc f = random_boundary_probe(sys.NB, 3);
    for (const cd eta : {cd(0.3, 0.0), cd(4.0, 1.0), cd(17.5, 0.2), cd(2.0, 5.0)}) {
        const OperatorEvaluation eval = build_T(sys, eta);
        CHECK(eval.T.cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("smallest singular value dips by orders of magnitude at the first eigenvalue") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.025);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const double k_dip = locate_dip(sys, 1.89, 2.09, 20, 18);
    const double at_dip = sigma_min_at(sys, k_dip);
    const double away = std::min(sigma_min_at(sys, k_dip - 0.1), sigma_min_at(sys, k_dip + 0.1));
    CHECK(k_dip > 1.95);
    CHECK(k_dip < 2.03);
    CHECK(away / at_dip >= 1e3);
}

TEST_CASE("operator function is holomorphic (Cauchy-Riemann on finite differences)") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const cd eta(3.0, 0.5);
    const double d = 1e-4;
    const MatrixXc d_re = (build_T(sys, eta + cd(d, 0)).T - build_T(sys, eta - cd(d, 0)).T) / (2 * d);
    const MatrixXc d_im = (build_T(sys, eta + cd(0, d)).T - build_T(sys, eta - cd(0, d)).T) / (2 * d);
    const MatrixXc rotated = d_im / cd(0, 1);
    CHECK((d_re - rotated).norm() / d_re.norm() < 1e-6);
}

TEST_CASE("apply_T_inverse: zero probe, inverse consistency, resolvent growth") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.05);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());

    const OperatorEvaluation eval = build_T(sys, cd(4.8, 0.4));  // away from eigenvalues
    CHECK(apply_T_inverse(eval, VectorXc::Zero(sys.NB)).norm() == 0.0);

    const VectorXc f = random_boundary_probe(sys.NB, 5);
    double rcond = 0.0;
    const VectorXc x = apply_T_inverse(eval, f, &rcond);
    CHECK(rcond > 0.0);
    CHECK((eval.T * x - f).norm() / f.norm() < 1e-8);

    // resolvent blow-up at distance 1e-4 (in eta) from the discrete eigenvalue
    const double k_dip = locate_dip(sys, 1.93, 2.05, 12, 16);
    const OperatorEvaluation near_ev = build_T(sys, cd(k_dip * k_dip, 1e-4));
    const VectorXc xn = apply_T_inverse(near_ev, f);
    CHECK(xn.norm() / f.norm() >= 1e2);
}

TEST_CASE("linearity in the boundary datum") {
    const Mesh mesh = generate_diamond_mesh(1.0, 0.2);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const VectorXc g1 = random_boundary_probe(sys.NB, 11), g2 = random_boundary_probe(sys.NB, 12);
    const cd alpha(1.3, -0.4), eta(2.2, 0.3);
    const VectorXc lhs = helmholtz_solve(sys, RobinSystem::anisotropic, eta, alpha * g1 + g2);
    const VectorXc rhs = alpha * helmholtz_solve(sys, RobinSystem::anisotropic, eta, g1) +
                         helmholtz_solve(sys, RobinSystem::anisotropic, eta, g2);
    CHECK((lhs - rhs).norm() / rhs.norm() < 1e-12);
}

TEST_CASE("eta-continuity with a frozen slope bound") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const cd eta(3.0, 0.2);
    const MatrixXc t0 = build_T(sys, eta).T;
    for (const double d : {1e-3, 5e-4}) {
        const double diff = (build_T(sys, eta + cd(d, 0)).T - t0).norm();
        CHECK(diff <= 0.02 * d);  // measured slope ~6e-3 per unit eta at this benchmark
    }
}

TEST_CASE("spectral conventions agree entrywise") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    const cd kval(1.7, 0.2);
    CHECK(spectral_to_eta(kval, SpectralMode::k) == kval * kval);
    CHECK(spectral_to_eta(kval, SpectralMode::eta) == kval);
    const MatrixXc a = build_T(sys, spectral_to_eta(kval, SpectralMode::k)).T;
    const MatrixXc b = build_T(sys, kval * kval).T;
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(build_T(sys, cd(2.0, -0.5)).analytic_continuation);
    CHECK(!build_T(sys, cd(2.0, 0.5)).analytic_continuation);
}

TEST_CASE("resolvent engine reproduces the dense route") {
    const Mesh mesh = generate_diamond_mesh(1.0, 0.1);
    const DiscreteSystem sys = assemble_system(mesh, material_isotropic_n16());
    ResolventSolver solver(sys);
    const cd eta(1.8, 0.25);
    MatrixXc probes(sys.NB, 3);
    for (int j = 0; j < 3; ++j) probes.col(j) = random_boundary_probe(sys.NB, 20 + j);
    const MatrixXc fast = solver.solve(eta, probes);
    const OperatorEvaluation eval = build_T(sys, eta);
    for (int j = 0; j < 3; ++j) {
        const VectorXc dense = apply_T_inverse(eval, probes.col(j));
        CHECK((fast.col(j) - dense).norm() / dense.norm() < 1e-8);
    }
}

TEST_CASE("boundary datum length is validated") {
    const Mesh mesh = generate_disc_mesh(0.5, 0.2);
    const DiscreteSystem sys = assemble_system(mesh, material_reference());
    CHECK_THROWS_AS(helmholtz_solve(sys, RobinSystem::reference, cd(1, 0), VectorXc::Zero(3)),
                    std::invalid_argument);
}

TEST_SUITE_END();
