#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "rda/linsolve.hpp"

using namespace rda;

namespace {

SparseComplexMatrix random_sparse(int n, double diag, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<Eigen::Triplet<Complex>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, Complex(diag + u(rng), u(rng)));
        for (int j : {i - 3, i + 1, i + 7}) {
            if (j >= 0 && j < n) {
                t.emplace_back(i, j, Complex(u(rng), u(rng)));
            }
        }
    }
    SparseComplexMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

Eigen::VectorXcd random_vector(int n, unsigned seed)
{
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        v(i) = Complex(d(rng), d(rng));
    }
    return v;
}

} // namespace

TEST(Matvec, AgreesWithDenseProduct)
{
    const SparseComplexMatrix a = random_sparse(50, 4.0, 1);
    const Eigen::VectorXcd x = random_vector(50, 2);
    const Eigen::VectorXcd dense = Eigen::MatrixXcd(a) * x;
    EXPECT_LT((matvec(a, x) - dense).norm(), 1e-13 * dense.norm());
    EXPECT_THROW(matvec(a, Eigen::VectorXcd::Zero(49)), DimensionError);
}

TEST(Matvec, RealMatrixComplexVector)
{
    SparseRealMatrix a(2, 2);
    a.insert(0, 1) = 2.0;
    a.insert(1, 0) = -1.0;
    const Eigen::Vector2cd y = matvec(a, Eigen::Vector2cd(Complex(1, 1), Complex(0, 3)));
    EXPECT_EQ(y(0), Complex(0, 6));
    EXPECT_EQ(y(1), Complex(-1, -1));
}

TEST(Nnz, IgnoresTinyEntries)
{
    SparseComplexMatrix a(3, 3);
    a.insert(0, 0) = 1.0;
    a.insert(1, 2) = 1e-16;
    a.insert(2, 1) = Complex(0, 0.5);
    EXPECT_EQ(count_nnz(a), 2);
    EXPECT_EQ(count_nnz(SparseComplexMatrix(4, 4)), 0);
}

TEST(Gmres, IdentityInOneStep)
{
    SparseComplexMatrix id(20, 20);
    id.setIdentity();
    const Eigen::VectorXcd b = random_vector(20, 5);
    const GmresResult r = gmres(id, b, nullptr);
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.iterations, 1);
    EXPECT_LT((r.x - b).norm(), 1e-14 * b.norm());
}

TEST(Gmres, DistinctEigenvaluesBoundIterations)
{
    SparseComplexMatrix d(10, 10);
    for (int i = 0; i < 10; ++i) {
        d.insert(i, i) = double(i + 1);
    }
    const Eigen::VectorXcd b = Eigen::VectorXcd::Ones(10);
    GmresOptions o;
    o.tol = 1e-12;
    const GmresResult r = gmres(d, b, nullptr, o);
    EXPECT_TRUE(r.report.converged);
    EXPECT_LE(r.report.iterations, 10);
    for (int i = 0; i < 10; ++i) {
        EXPECT_NEAR(std::abs(r.x(i) - 1.0 / (i + 1)), 0.0, 1e-10);
    }
}

TEST(Gmres, MatchesDirectSolveAndHistoryIsMonotone)
{
    const SparseComplexMatrix a = random_sparse(120, 5.0, 7);
    const Eigen::VectorXcd b = random_vector(120, 8);
    const Eigen::VectorXcd oracle = dense_solve(Eigen::MatrixXcd(a), b);
    for (int restart : {0, 15}) {
        GmresOptions o;
        o.tol = 1e-10;
        o.restart = restart;
        const GmresResult r = gmres(a, b, nullptr, o);
        ASSERT_TRUE(r.report.converged);
        EXPECT_LT((r.x - oracle).norm(), 1e-8 * oracle.norm());
        EXPECT_LE(r.report.true_relative_residual, 1e-9);
        const auto& h = r.report.residual_history;
        EXPECT_EQ(h.front(), 1.0);
        for (std::size_t i = 1; i < h.size(); ++i) {
            if (restart == 0) {
                EXPECT_LE(h[i], h[i - 1] * (1 + 1e-12));
            }
        }
    }
}

TEST(Gmres, PreconditionerCounted)
{
    const SparseComplexMatrix a = random_sparse(40, 6.0, 11);
    Eigen::VectorXcd inv_diag(40);
    for (int i = 0; i < 40; ++i) {
        inv_diag(i) = 1.0 / a.coeff(i, i);
    }
    const LinearOperator jac = [&inv_diag](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        return inv_diag.cwiseProduct(v);
    };
    const GmresResult r = gmres(a, random_vector(40, 12), jac);
    EXPECT_TRUE(r.report.converged);
    EXPECT_EQ(r.report.preconditioner_applications, r.report.iterations + 1);
}

TEST(Gmres, IterationCapAndZeroRhs)
{
    const SparseComplexMatrix a = random_sparse(80, 0.2, 3);
    GmresOptions o;
    o.max_iter = 5;
    const GmresResult r = gmres(a, random_vector(80, 4), nullptr, o);
    EXPECT_FALSE(r.report.converged);
    EXPECT_EQ(r.report.status, SolverStatus::max_iterations);
    EXPECT_EQ(r.report.iterations, 5);

    const GmresResult z = gmres(a, Eigen::VectorXcd::Zero(80), nullptr);
    EXPECT_TRUE(z.report.converged);
    EXPECT_EQ(z.x.norm(), 0.0);

    o.tol = 0.0;
    EXPECT_THROW(gmres(a, Eigen::VectorXcd::Ones(80), nullptr, o), ConfigError);
    EXPECT_THROW(gmres(a, Eigen::VectorXcd::Ones(79), nullptr), DimensionError);
}

TEST(DenseSolve, SolvesAndRejectsSingular)
{
    Eigen::Matrix2cd a;
    a << Complex(2, 0), Complex(0, 1), Complex(1, 0), Complex(3, 0);
    const Eigen::Vector2cd b(Complex(1, 0), Complex(0, 1));
    const Eigen::Vector2cd x = dense_solve(a, b);
    EXPECT_LT((a * x - b).norm(), 1e-15);
    Eigen::Matrix2d s;
    s << 1, 2, 2, 4;
    EXPECT_THROW(dense_solve(s, Eigen::Vector2d(1, 1)), NumericalError);
    EXPECT_THROW(dense_solve(s, Eigen::Vector3d(1, 1, 1)), DimensionError);
}

TEST(Spectrum, DiagonalAndHermitian)
{
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    d(2, 2) = Complex(0, 3);
    const Eigen::VectorXcd ev = dense_spectrum(d);
    EXPECT_LT(std::abs(ev(0) - Complex(0, 3)), 1e-14);
    EXPECT_LT(std::abs(ev(1) - 1.0), 1e-14);
    EXPECT_LT(std::abs(ev(2) - 2.0), 1e-14);

    Eigen::MatrixXcd h(2, 2);
    h << 2.0, Complex(0, 1), Complex(0, -1), 2.0;
    const Eigen::VectorXcd eh = dense_spectrum(h);
    EXPECT_NEAR(eh(0).real(), 1.0, 1e-14);
    EXPECT_NEAR(eh(1).real(), 3.0, 1e-14);
    EXPECT_NEAR(std::abs(eh(0).imag()) + std::abs(eh(1).imag()), 0.0, 1e-14);

    EXPECT_THROW(dense_spectrum(Eigen::MatrixXcd::Zero(2, 3)), DimensionError);
    EXPECT_THROW(dense_spectrum(Eigen::MatrixXcd::Zero(kMaxDenseSpectrumSize + 1, kMaxDenseSpectrumSize + 1)),
                 UnsupportedError);
}

TEST(SparseDirect, AgreesWithDense)
{
    const SparseComplexMatrix a = random_sparse(60, 3.0, 21);
    const Eigen::VectorXcd b = random_vector(60, 22);
    EXPECT_LT((sparse_direct_solve(a, b) - dense_solve(Eigen::MatrixXcd(a), b)).norm(), 1e-11);
}

TEST(Writers, MatrixMarketAndTrace)
{
    SparseComplexMatrix a(2, 3);
    a.insert(0, 2) = Complex(1.5, -2);
    a.insert(1, 0) = 4.0;
    std::ostringstream mm;
    write_matrix_market(mm, a);
    EXPECT_EQ(mm.str(), "%%MatrixMarket matrix coordinate complex general\n2 3 2\n1 3 1.5 -2\n2 1 4 0\n");

    SolverReport rep;
    rep.residual_history = {1.0, 0.25};
    std::ostringstream tr;
    write_residual_trace(tr, rep);
    EXPECT_EQ(tr.str(), "iter,relres\n0,1\n1,0.25\n");
}
