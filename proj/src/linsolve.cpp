#include "rda/linsolve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace rda {

namespace {

bool all_finite(const Eigen::VectorXcd& v)
{
    return v.array().isFinite().all();
}

// Rotation [c s; -conj(s) c] with real c that maps (a, b) to (r, 0).
void make_givens(const Complex& a, const Complex& b, double& c, Complex& s)
{
    const double ab = std::abs(b);
    if (ab == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    const double aa = std::abs(a);
    const double t = std::hypot(aa, ab);
    if (aa == 0.0) {
        c = 0.0;
        s = std::conj(b) / ab;
        return;
    }
    c = aa / t;
    s = (a / aa) * std::conj(b) / t;
}

} // namespace

GmresResult gmres(const LinearOperator& a, const Eigen::VectorXcd& b, const LinearOperator& precond,
                  const GmresOptions& options)
{
    if (!(options.tol > 0.0)) {
        throw ConfigError("gmres: tolerance must be positive");
    }
    const auto start = std::chrono::steady_clock::now();
    const Eigen::Index n = b.size();

    GmresResult result;
    SolverReport& rep = result.report;
    result.x = Eigen::VectorXcd::Zero(n);

    const auto apply_m = [&](const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        if (!precond) {
            return v;
        }
        ++rep.preconditioner_applications;
        return precond(v);
    };

    Eigen::VectorXcd r = apply_m(b);
    double beta = r.norm();
    const double reference = beta;
    rep.residual_history.push_back(1.0);
    if (!std::isfinite(beta)) {
        throw NumericalError("gmres: non-finite preconditioned right-hand side");
    }
    if (reference == 0.0) {
        rep.converged = true;
        rep.status = SolverStatus::converged;
        return result;
    }

    const int cycle = options.restart > 0 ? options.restart : options.max_iter;
    bool done = false;
    while (!done && rep.iterations < options.max_iter) {
        const int max_j = std::min(cycle, options.max_iter - rep.iterations);
        std::vector<Eigen::VectorXcd> basis;
        basis.reserve(max_j + 1);
        basis.push_back(r / beta);
        Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(max_j + 1, max_j);
        Eigen::VectorXcd g = Eigen::VectorXcd::Zero(max_j + 1);
        g(0) = beta;
        std::vector<double> cs(max_j);
        std::vector<Complex> sn(max_j);

        int j = 0;
        for (; j < max_j; ++j) {
            Eigen::VectorXcd w = apply_m(a(basis[j]));
            if (!all_finite(w)) {
                throw NumericalError("gmres: non-finite values in Krylov vector");
            }
            const double scale = w.norm();
            for (int pass = 0; pass < 2; ++pass) {
                for (int i = 0; i <= j; ++i) {
                    const Complex h = basis[i].dot(w);
                    hess(i, j) += h;
                    w -= h * basis[i];
                }
            }
            const double sub = w.norm();
            hess(j + 1, j) = sub;

            for (int i = 0; i < j; ++i) {
                const Complex t = cs[i] * hess(i, j) + sn[i] * hess(i + 1, j);
                hess(i + 1, j) = -std::conj(sn[i]) * hess(i, j) + cs[i] * hess(i + 1, j);
                hess(i, j) = t;
            }
            make_givens(hess(j, j), hess(j + 1, j), cs[j], sn[j]);
            hess(j, j) = cs[j] * hess(j, j) + sn[j] * hess(j + 1, j);
            hess(j + 1, j) = 0.0;
            g(j + 1) = -std::conj(sn[j]) * g(j);
            g(j) = cs[j] * g(j);

            ++rep.iterations;
            const double relres = std::abs(g(j + 1)) / reference;
            rep.residual_history.push_back(relres);

            const bool breakdown = sub <= 1e-14 * std::max(scale, 1e-300);
            if (relres <= options.tol || breakdown) {
                rep.converged = relres <= options.tol;
                rep.status = rep.converged ? SolverStatus::converged : SolverStatus::breakdown;
                done = true;
                ++j;
                break;
            }
            basis.push_back(w / sub);
        }

        const int k = j;
        if (k > 0) {
            const Eigen::VectorXcd y = hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
            for (int i = 0; i < k; ++i) {
                result.x += y(i) * basis[i];
            }
        }
        if (!done && rep.iterations < options.max_iter) {
            r = apply_m(b - a(result.x));
            beta = r.norm();
            if (beta / reference <= options.tol) {
                rep.converged = true;
                rep.status = SolverStatus::converged;
                done = true;
            }
        }
    }
    if (!done) {
        rep.status = SolverStatus::max_iterations;
        rep.converged = false;
    }

    const double bnorm = b.norm();
    rep.true_relative_residual = bnorm > 0.0 ? (b - a(result.x)).norm() / bnorm : 0.0;
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

GmresResult gmres(const SparseComplexMatrix& a, const Eigen::VectorXcd& b, const LinearOperator& precond,
                  const GmresOptions& options)
{
    if (a.rows() != a.cols() || a.rows() != b.size()) {
        throw DimensionError("gmres: matrix and right-hand side dimensions differ");
    }
    return gmres([&a](const Eigen::VectorXcd& v) -> Eigen::VectorXcd { return a * v; }, b, precond, options);
}

Eigen::VectorXcd dense_spectrum(const Eigen::MatrixXcd& a)
{
    if (a.rows() != a.cols()) {
        throw DimensionError("dense_spectrum: matrix is not square");
    }
    if (a.rows() > kMaxDenseSpectrumSize) {
        throw UnsupportedError("dense_spectrum: size " + std::to_string(a.rows()) + " exceeds cap "
                               + std::to_string(kMaxDenseSpectrumSize));
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, false);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("dense_spectrum: QR iteration did not converge");
    }
    Eigen::VectorXcd ev = solver.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](const Complex& x, const Complex& y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return ev;
}

Eigen::VectorXcd sparse_direct_solve(const SparseComplexMatrix& a, const Eigen::VectorXcd& b)
{
    Eigen::SparseMatrix<Complex, Eigen::ColMajor, int> col = a;
    Eigen::SparseLU<Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>> lu;
    lu.compute(col);
    if (lu.info() != Eigen::Success) {
        throw NumericalError("sparse_direct_solve: factorization failed: " + lu.lastErrorMessage());
    }
    Eigen::VectorXcd x = lu.solve(b);
    if (!all_finite(x)) {
        throw NumericalError("sparse_direct_solve: non-finite solution");
    }
    return x;
}

void write_residual_trace(std::ostream& out, const SolverReport& report)
{
    char buf[64];
    out << "iter,relres\n";
    for (std::size_t i = 0; i < report.residual_history.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, report.residual_history[i]);
        out << buf;
    }
}

void write_residual_trace(const std::string& path, const SolverReport& report)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_residual_trace(out, report);
}

void write_matrix_market(std::ostream& out, const SparseComplexMatrix& a)
{
    char buf[128];
    out << "%%MatrixMarket matrix coordinate complex general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
    for (int i = 0; i < a.outerSize(); ++i) {
        for (SparseComplexMatrix::InnerIterator it(a, i); it; ++it) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g %.17g\n", i + 1, static_cast<int>(it.col()) + 1,
                          it.value().real(), it.value().imag());
            out << buf;
        }
    }
}

void write_matrix_market(const std::string& path, const SparseComplexMatrix& a)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_matrix_market(out, a);
}

} // namespace rda
