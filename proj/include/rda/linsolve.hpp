#pragma once

#include <complex>
#include <functional>
#include <algorithm>
#include <cmath>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>
#include <Eigen/SparseCore>

#include "rda/error.hpp"

namespace rda {

using Complex = std::complex<double>;
using SparseComplexMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor, int>;
using SparseRealMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// y = A x with a dimension check.
template <typename MatScalar, typename Derived>
Eigen::Matrix<typename Eigen::ScalarBinaryOpTraits<MatScalar, typename Derived::Scalar>::ReturnType, Eigen::Dynamic, 1>
matvec(const Eigen::SparseMatrix<MatScalar, Eigen::RowMajor, int>& a, const Eigen::MatrixBase<Derived>& x)
{
    if (a.cols() != x.size()) {
        throw DimensionError("matvec: matrix has " + std::to_string(a.cols()) + " columns, vector has "
                             + std::to_string(x.size()) + " entries");
    }
    return a * x;
}

/// Structural nonzeros with |a_ij| >= 1e-14 max |a|.
template <typename Scalar>
Eigen::Index count_nnz(const Eigen::SparseMatrix<Scalar, Eigen::RowMajor, int>& a)
{
    double max_abs = 0.0;
    for (Eigen::Index i = 0; i < a.nonZeros(); ++i) {
        max_abs = std::max(max_abs, static_cast<double>(std::abs(a.valuePtr()[i])));
    }
    if (max_abs == 0.0) {
        return 0;
    }
    Eigen::Index count = 0;
    for (Eigen::Index i = 0; i < a.nonZeros(); ++i) {
        if (std::abs(a.valuePtr()[i]) >= 1e-14 * max_abs) {
            ++count;
        }
    }
    return count;
}

using LinearOperator = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct GmresOptions {
    double tol = 1e-8;
    int max_iter = 2000;
    /// Restart length; 0 runs full GMRES.
    int restart = 0;
};

enum class SolverStatus { converged, breakdown, max_iterations };

struct SolverReport {
    int iterations = 0;
    /// Preconditioned residual norm relative to ||M^{-1} b||, starting with 1.
    std::vector<double> residual_history;
    bool converged = false;
    SolverStatus status = SolverStatus::max_iterations;
    double wall_seconds = 0.0;
    int preconditioner_applications = 0;
    /// ||b - A x|| / ||b|| of the returned iterate.
    double true_relative_residual = 0.0;
};

struct GmresResult {
    Eigen::VectorXcd x;
    SolverReport report;
};

/// Left-preconditioned GMRES from a zero initial guess. Minimizes
/// ||M^{-1}(b - A x)||_2 over the Krylov space; modified Gram-Schmidt with
/// one reorthogonalization pass. An empty `precond` means M = I.
GmresResult gmres(const LinearOperator& a, const Eigen::VectorXcd& b, const LinearOperator& precond,
                  const GmresOptions& options = {});

GmresResult gmres(const SparseComplexMatrix& a, const Eigen::VectorXcd& b, const LinearOperator& precond,
                  const GmresOptions& options = {});

/// LU with partial pivoting; throws NumericalError if A is singular to
/// working precision.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, DerivedB::ColsAtCompileTime>
dense_solve(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b)
{
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != a.cols() || a.rows() != b.rows()) {
        throw DimensionError("dense_solve: incompatible dimensions");
    }
    Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e2 * std::numeric_limits<double>::epsilon())) {
        throw NumericalError("dense_solve: matrix is singular to working precision (rcond = "
                             + std::to_string(rcond) + ")");
    }
    return lu.solve(b);
}

inline constexpr Eigen::Index kMaxDenseSpectrumSize = 600;

/// All eigenvalues (Hessenberg reduction + shifted QR), sorted by real then
/// imaginary part.
Eigen::VectorXcd dense_spectrum(const Eigen::MatrixXcd& a);

/// Sparse LU direct solve (used for small and moderate systems).
Eigen::VectorXcd sparse_direct_solve(const SparseComplexMatrix& a, const Eigen::VectorXcd& b);

/// "iter,relres" CSV.
void write_residual_trace(std::ostream& out, const SolverReport& report);
void write_residual_trace(const std::string& path, const SolverReport& report);

/// Matrix Market coordinate format, complex general, 1-based indices.
void write_matrix_market(std::ostream& out, const SparseComplexMatrix& a);
void write_matrix_market(const std::string& path, const SparseComplexMatrix& a);

} // namespace rda
