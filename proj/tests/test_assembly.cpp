#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "rda/assembly.hpp"

using namespace rda;

namespace {

HelmholtzConfig config(int m, double k = 5.0, double eps = 0.0)
{
    HelmholtzConfig cfg;
    cfg.k = k;
    cfg.eps = eps;
    cfg.degree = m;
    return cfg;
}

ReconstructionOperator recon(const TriMesh& mesh, int m)
{
    ReconstructionOptions o;
    o.estimate_lambda = false;
    return build_reconstruction_operator(mesh, m, o);
}

Eigen::MatrixXcd dense(const SparseComplexMatrix& a)
{
    return Eigen::MatrixXcd(a);
}

Eigen::VectorXcd polynomial_coefficients(int m)
{
    Eigen::VectorXcd c(dim_pm(m));
    for (int i = 0; i < c.size(); ++i) {
        c(i) = Complex(1.0 / (i + 1), 0.3 * ((i % 3) - 1));
    }
    return c;
}

} // namespace

TEST(Assembly, DofCounts)
{
    const TriMesh mesh = uniform_square_mesh(10);
    const HelmholtzConfig cfg = config(2);
    const ManufacturedSolution sol = plane_wave_solution(cfg.k, cfg.eps);
    EXPECT_EQ(assemble_rda_system(mesh, recon(mesh, 2), cfg, sol).size(), 200);
    EXPECT_EQ(assemble_dg_system(mesh, 2, cfg, sol).size(), 1200);
}

TEST(Assembly, ZeroDataGivesZeroRhs)
{
    const TriMesh mesh = uniform_square_mesh(4);
    const GlobalSystem sys = assemble_rda_system(mesh, recon(mesh, 2), config(2), zero_solution());
    EXPECT_EQ(sys.rhs.norm(), 0.0);
    EXPECT_GT(sys.matrix.norm(), 0.0);
}

TEST(Assembly, ComplexSymmetric)
{
    // Every term of the form is symmetric without conjugation.
    const TriMesh mesh = uniform_square_mesh(5);
    for (bool imag : {false, true}) {
        for (double eps : {0.0, 25.0}) {
            HelmholtzConfig cfg = config(3, 5.0, eps);
            cfg.imaginary_penalty = imag;
            const Eigen::MatrixXcd a = dense(assemble_rda_system(mesh, recon(mesh, 3), cfg, zero_solution()).matrix);
            EXPECT_LT((a - a.transpose()).norm(), 1e-11 * a.norm());
            cfg.degree = 2;
            const Eigen::MatrixXcd d = dense(assemble_dg_system(mesh, 2, cfg, zero_solution()).matrix);
            EXPECT_LT((d - d.transpose()).norm(), 1e-11 * d.norm());
        }
    }
}

TEST(Assembly, RealPartHermitianWithoutImaginaryTerms)
{
    // With a real penalty and eps = 0 the imaginary part is the boundary
    // mass k M_bdy, which is positive semidefinite.
    const TriMesh mesh = uniform_square_mesh(4);
    HelmholtzConfig cfg = config(2);
    cfg.imaginary_penalty = false;
    const Eigen::MatrixXcd a = dense(assemble_rda_system(mesh, recon(mesh, 2), cfg, zero_solution()).matrix);
    const Eigen::MatrixXd im = a.imag();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (im + im.transpose()));
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10 * im.norm());
}

TEST(Assembly, Deterministic)
{
    const TriMesh mesh = uniform_square_mesh(6);
    const HelmholtzConfig cfg = config(2);
    const ManufacturedSolution sol = plane_wave_solution(cfg.k, cfg.eps);
    const ReconstructionOperator op = recon(mesh, 2);
    const GlobalSystem a = assemble_rda_system(mesh, op, cfg, sol);
    const GlobalSystem b = assemble_rda_system(mesh, op, cfg, sol);
    ASSERT_EQ(a.nnz(), b.nnz());
    for (Eigen::Index i = 0; i < a.nnz(); ++i) {
        EXPECT_EQ(a.matrix.valuePtr()[i], b.matrix.valuePtr()[i]);
        EXPECT_EQ(a.matrix.innerIndexPtr()[i], b.matrix.innerIndexPtr()[i]);
    }
    EXPECT_EQ(a.rhs, b.rhs);
}

TEST(Assembly, RejectsMismatchedOperator)
{
    const TriMesh mesh = uniform_square_mesh(6);
    const ReconstructionOperator op = recon(mesh, 3);
    EXPECT_THROW(assemble_rda_system(mesh, op, config(2), zero_solution()), Error);
    EXPECT_THROW(assemble_rda_system(uniform_square_mesh(5), op, config(3), zero_solution()), Error);
    HelmholtzConfig bad = config(3);
    bad.k = -1.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Assembly, DgCouplingOnlyBetweenNeighbours)
{
    const TriMesh mesh = uniform_square_mesh(4);
    const SparseComplexMatrix a = assemble_dg_system(mesh, 2, config(2), zero_solution()).matrix;
    const int n = dim_pm(2);
    for (int i = 0; i < a.rows(); ++i) {
        for (SparseComplexMatrix::InnerIterator it(a, i); it; ++it) {
            const int K = i / n, L = static_cast<int>(it.col()) / n;
            if (K != L) {
                const auto nb = mesh.neighbors(K);
                EXPECT_NE(std::find(nb.begin(), nb.end(), L), nb.end());
            }
        }
    }
    const int interior = mesh.num_faces() - mesh.num_boundary_faces();
    EXPECT_LE(count_nnz(a), Eigen::Index(n) * n * (mesh.num_elements() + 2 * interior));
}

TEST(Preconditioner, SymmetricPositiveDefinite)
{
    for (int n : {1, 3, 8}) {
        for (double k : {5.0, 20.0}) {
            const TriMesh mesh = uniform_square_mesh(n);
            const Eigen::MatrixXd p(assemble_p0_preconditioner(mesh, config(2, k)));
            EXPECT_LT((p - p.transpose()).norm(), 1e-13 * p.norm());
            EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(p).info(), Eigen::Success);
        }
    }
    const TriMesh single = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}});
    const Eigen::MatrixXd p(assemble_p0_preconditioner(single, config(2, 3.0)));
    ASSERT_EQ(p.rows(), 1);
    EXPECT_NEAR(p(0, 0), 9.0 * 0.5 + 3.0 * (2.0 + std::sqrt(2.0)), 1e-12);
}

TEST(Preconditioner, BoundsMassFromBelow)
{
    const TriMesh mesh = uniform_square_mesh(6);
    const double k = 7.0;
    const SparseRealMatrix p = assemble_p0_preconditioner(mesh, config(2, k));
    std::mt19937 rng(3);
    std::normal_distribution<double> d;
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXd v(mesh.num_elements());
        double mass = 0.0;
        for (int K = 0; K < v.size(); ++K) {
            v(K) = d(rng);
            mass += mesh.area[K] * v(K) * v(K);
        }
        EXPECT_GE(v.dot(p * v), k * k * mass * (1 - 1e-12));
    }
}

TEST(ManufacturedData, SourceAndRobinConsistent)
{
    const double k = 4.0, eps = 3.0, d = 1e-4;
    for (const ManufacturedSolution& sol : {plane_wave_solution(k, eps), bessel_solution(k, eps)}) {
        for (const Point2& x : {Point2(0.3, 0.7), Point2(0.81, 0.12)}) {
            const Complex lap = (sol.u(x + Point2(d, 0)) + sol.u(x - Point2(d, 0)) + sol.u(x + Point2(0, d))
                                 + sol.u(x - Point2(0, d)) - 4.0 * sol.u(x))
                                / (d * d);
            EXPECT_LT(std::abs(sol.f(x) - (-lap - Complex(k * k, -eps) * sol.u(x))), 1e-4);
            const Vector2c fd((sol.u(x + Point2(d, 0)) - sol.u(x - Point2(d, 0))) / (2 * d),
                              (sol.u(x + Point2(0, d)) - sol.u(x - Point2(0, d))) / (2 * d));
            EXPECT_LT((sol.grad(x) - fd).norm(), 1e-6);
            const Point2 n(0.6, -0.8);
            EXPECT_LT(std::abs(sol.g(x, n) - (fd(0) * n.x() + fd(1) * n.y() + Complex(0, k) * sol.u(x))), 1e-6);
        }
    }
    // The Bessel source stays finite at the centre.
    const ManufacturedSolution b = bessel_solution(k);
    EXPECT_TRUE(std::isfinite(std::abs(b.f(Point2(0.5, 0.5)))));
}

TEST(ManufacturedData, BesselSourceIsRadial)
{
    const double k = 6.0;
    const ManufacturedSolution b = bessel_solution(k);
    const Point2 x(0.2, 0.9);
    const double r = (x - Point2(0.5, 0.5)).norm();
    EXPECT_NEAR(std::abs(b.f(x) - std::sin(k * r) / r), 0.0, 1e-12);
}

TEST(ErrorNorms, ZeroApproximationMeasuresSolution)
{
    const TriMesh mesh = uniform_square_mesh(8);
    const HelmholtzConfig cfg = config(2);
    const DiscreteSpace space = reconstructed_space(recon(mesh, 2));
    const ManufacturedSolution sol = plane_wave_solution(cfg.k, cfg.eps);
    const ErrorReport e = compute_error_norms(mesh, space, Eigen::VectorXcd::Zero(space.num_dofs), &sol, cfg);
    EXPECT_NEAR(e.l2, 1.0, 1e-10);
    EXPECT_NEAR(e.volume_gradient, cfg.k * cfg.k, 1e-8);
    EXPECT_NEAR(e.interior_jump, 0.0, 1e-20);
    EXPECT_NEAR(e.boundary, cfg.k * 4.0, 1e-8);
    EXPECT_GE(e.energy, e.dg);
}

TEST(Solve, ReproducesDegreeMPolynomials)
{
    const TriMesh mesh = uniform_square_mesh(8);
    for (int m = 2; m <= 4; ++m) {
        const HelmholtzConfig cfg = config(m, 3.0, 1.0);
        const ManufacturedSolution sol = polynomial_solution(polynomial_coefficients(m), cfg.k, cfg.eps);
        const ReconstructionOperator op = recon(mesh, m);
        const GlobalSystem sys = assemble_rda_system(mesh, op, cfg, sol);
        const Eigen::VectorXcd uh = sparse_direct_solve(sys.matrix, sys.rhs);
        const ErrorReport e = compute_error_norms(mesh, reconstructed_space(op), uh, &sol, cfg);
        EXPECT_LT(e.l2, 1e-9) << "m=" << m;
        EXPECT_LT(e.energy, 1e-7) << "m=" << m;
    }
}

TEST(Solve, GalerkinOrthogonality)
{
    const TriMesh mesh = uniform_square_mesh(10);
    const HelmholtzConfig cfg = config(2);
    const ManufacturedSolution sol = plane_wave_solution(cfg.k, cfg.eps);
    const ReconstructionOperator op = recon(mesh, 2);
    for (const DiscreteSpace& space : {reconstructed_space(op), discontinuous_space(mesh, 2)}) {
        const GlobalSystem sys = assemble_system(mesh, space, cfg, sol);
        const Eigen::VectorXcd uh = sparse_direct_solve(sys.matrix, sys.rhs);
        const Eigen::VectorXcd au = exact_form_against_basis(mesh, space, cfg, sol);
        const Eigen::VectorXcd residual = au - sys.matrix * uh;
        EXPECT_LE(residual.norm(), 1e-8 * au.norm());
    }
}

TEST(Solve, EnergyErrorDominatesDgError)
{
    const TriMesh mesh = uniform_square_mesh(6);
    const HelmholtzConfig cfg = config(2);
    const ManufacturedSolution sol = plane_wave_solution(cfg.k, cfg.eps);
    const ReconstructionOperator op = recon(mesh, 2);
    const GlobalSystem sys = assemble_rda_system(mesh, op, cfg, sol);
    const Eigen::VectorXcd uh = sparse_direct_solve(sys.matrix, sys.rhs);
    const ErrorReport e = compute_error_norms(mesh, reconstructed_space(op), uh, &sol, cfg);
    EXPECT_GT(e.dg, 0.0);
    EXPECT_GE(e.energy, e.dg);
    EXPECT_NEAR(e.dg * e.dg, e.volume_gradient + e.interior_jump + e.boundary, 1e-12 * e.dg * e.dg);
}

TEST(Solve, DgSpaceAtDegreeZeroHasNoConsistencyTerms)
{
    // Piecewise constants have zero gradients, so the DG matrix reduces to
    // i mu jumps, the shifted mass and the boundary mass.
    const TriMesh mesh = uniform_square_mesh(3);
    HelmholtzConfig cfg = config(2, 2.0);
    cfg.eta = 4.0;
    const Eigen::MatrixXcd a = dense(assemble_system(mesh, discontinuous_space(mesh, 0), cfg, zero_solution()).matrix);
    for (int K = 0; K < mesh.num_elements(); ++K) {
        EXPECT_NEAR(a(K, K).real(), -cfg.k * cfg.k * mesh.area[K], 1e-12);
    }
}
