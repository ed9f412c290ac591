#include "rda/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "rda/discrete_space.hpp"
#include "rda/reconstruction.hpp"

namespace rda {

namespace {

constexpr const char* kVersion = "rda 1.0.0";

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

double lagrange_eval(const std::vector<double>& nodes, const std::vector<double>& values, double x)
{
    double s = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        double l = 1.0;
        for (std::size_t j = 0; j < nodes.size(); ++j) {
            if (j != i) {
                l *= (x - nodes[j]) / (nodes[i] - nodes[j]);
            }
        }
        s += l * values[i];
    }
    return s;
}

std::string join(const std::vector<int>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + std::to_string(v[i]);
    }
    return out;
}

ManufacturedSolution make_solution(const ExperimentConfig& cfg, double eps)
{
    if (cfg.solution == "plane") {
        return plane_wave_solution(cfg.k, eps);
    }
    if (cfg.solution == "bessel") {
        return bessel_solution(cfg.k, eps);
    }
    throw ConfigError("unknown solution '" + cfg.solution + "' (expected plane or bessel)");
}

void describe(ResultTable& t, const ExperimentConfig& cfg)
{
    t.set_meta("experiment", cfg.name);
    t.set_meta("version", kVersion);
    t.set_meta("k", format_number(cfg.k));
    t.set_meta("eps", cfg.eps == EpsMode::ksq ? "k^2" : "0");
    t.set_meta("eta", cfg.eta > 0.0 ? format_number(cfg.eta) : "10(m+1)^2");
    t.set_meta("penalty", cfg.imaginary_penalty ? "imaginary" : "real");
    t.set_meta("m", join(cfg.m_list));
    t.set_meta("n", join(cfg.n_list));
    t.set_meta("quadrature_exactness", "2m+2");
    t.set_meta("mesh", "uniform diagonal-split square, red-refined hierarchy");
    t.set_meta("gmres", "left-preconditioned, tol " + format_number(cfg.gmres.tol) + ", max_iter "
                            + std::to_string(cfg.gmres.max_iter) + ", restart "
                            + (cfg.gmres.restart > 0 ? std::to_string(cfg.gmres.restart) : "none"));
    t.set_meta("multigrid", std::string("V(") + std::to_string(cfg.smoother.pre) + ","
                                + std::to_string(cfg.smoother.post) + "), "
                                + (cfg.smoother.kind == SmootherKind::jacobi
                                       ? "damped Jacobi " + format_number(cfg.smoother.damping)
                                       : std::string("symmetric Gauss-Seidel"))
                                + ", injection prolongation, coarsest n >= 10, dense coarse solve");
}

struct SolveOutcome {
    Eigen::VectorXcd x;
    std::string method;
    int iterations = 0;
    bool converged = true;
    SolverReport report;
    bool iterative = false;
};

void log_timing(const std::string& what, double seconds)
{
    std::fprintf(stderr, "[timing] %s: %.3f s\n", what.c_str(), seconds);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SolveOutcome solve(const GlobalSystem& sys, const std::vector<TriMesh>& meshes, const HelmholtzConfig& hc,
                   const ExperimentConfig& cfg)
{
    SolveOutcome out;
    const bool direct = cfg.solver == SolverChoice::direct
                        || (cfg.solver == SolverChoice::automatic && sys.size() <= cfg.direct_max_dofs);
    if (direct) {
        out.x = sparse_direct_solve(sys.matrix, sys.rhs);
        out.method = "direct";
        return out;
    }
    const MultigridHierarchy h = build_hierarchy(meshes, hc, cfg.smoother);
    GmresResult res = gmres(sys.matrix, sys.rhs, vcycle_preconditioner(h), cfg.gmres);
    out.x = std::move(res.x);
    out.report = std::move(res.report);
    out.method = "pgmres";
    out.iterative = true;
    out.iterations = out.report.iterations;
    out.converged = out.report.converged;
    return out;
}

void write_diagnostics(const ExperimentConfig& cfg, const TriMesh& mesh, const GlobalSystem& sys,
                       const SolverReport* report)
{
    if (!cfg.dump_matrix.empty()) {
        write_matrix_market(cfg.dump_matrix, sys.matrix);
    }
    if (!cfg.trace_residual.empty() && report != nullptr) {
        write_residual_trace(cfg.trace_residual, *report);
    }
    if (!cfg.dump_mesh.empty()) {
        write_mesh(cfg.dump_mesh, mesh);
    }
}

ReconstructionOperator reconstruction(const TriMesh& mesh, int m)
{
    ReconstructionOptions opts;
    opts.estimate_lambda = false;
    return build_reconstruction_operator(mesh, m, opts);
}

} // namespace

double cm_theoretical(int m)
{
    if (m < 2 || m > 6) {
        throw UnsupportedError("cm_theoretical: m must lie in [2, 6]");
    }
    const SegmentRule q = segment_quadrature(2 * m + 2);
    const auto w2 = [m](double x) {
        double w = 1.0;
        for (int i = 0; i <= m; ++i) {
            w *= x - i - 0.5;
        }
        return w * w;
    };
    std::vector<double> cell(m + 1, 0.0);
    for (int c = 0; c <= m; ++c) {
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            cell[c] += q.weights(i) * w2(c + q.points(i, 0));
        }
    }
    double total = 0.0;
    for (double v : cell) {
        total += v;
    }
    return std::sqrt((m + 1) * cell[m / 2] / total);
}

Cm1dResult cm_empirical_1d(int m, int n_cells, const std::function<double(double)>& g, PatchWrap wrap)
{
    if (m < 1 || n_cells < 1) {
        throw ConfigError("cm_empirical_1d: need m >= 1 and n_cells >= 1");
    }
    const int nf = n_cells * (m + 1);
    if (wrap == PatchWrap::one_sided && nf < m + 1) {
        throw ConfigError("cm_empirical_1d: too few cells for a patch");
    }
    const double hf = 1.0 / nf;
    const SegmentRule q = segment_quadrature(2 * m + 12);
    const auto value = [&](double x) { return wrap == PatchWrap::periodic ? g(x - std::floor(x)) : g(x); };

    const auto cell_error = [&](int cell, const std::vector<double>& nodes, const std::vector<double>& vals) {
        double e = 0.0;
        for (Eigen::Index i = 0; i < q.size(); ++i) {
            const double x = (cell + q.points(i, 0)) * hf;
            const double d = g(x) - lagrange_eval(nodes, vals, x);
            e += q.weights(i) * hf * d * d;
        }
        return e;
    };

    std::vector<double> nodes(m + 1);
    std::vector<double> vals(m + 1);
    double rda = 0.0;
    for (int j = 0; j < nf; ++j) {
        int start = j - m / 2;
        if (wrap == PatchWrap::one_sided) {
            start = std::clamp(start, 0, nf - m - 1);
        }
        for (int i = 0; i <= m; ++i) {
            nodes[i] = (start + i + 0.5) * hf;
            vals[i] = value(nodes[i]);
        }
        rda += cell_error(j, nodes, vals);
    }
    double dg = 0.0;
    for (int c = 0; c < n_cells; ++c) {
        for (int i = 0; i <= m; ++i) {
            nodes[i] = (c * (m + 1) + i + 0.5) * hf;
            vals[i] = g(nodes[i]);
        }
        for (int i = 0; i <= m; ++i) {
            dg += cell_error(c * (m + 1) + i, nodes, vals);
        }
    }

    Cm1dResult r;
    r.rda_error = std::sqrt(rda);
    r.dg_error = std::sqrt(dg);
    r.exact_reproduction = r.rda_error <= 1e-12 && r.dg_error <= 1e-12;
    r.ratio = r.exact_reproduction ? 0.0 : r.rda_error / r.dg_error;
    return r;
}

Cm1dResult cm_empirical_1d(int m, int n_cells, PatchWrap wrap)
{
    if (n_cells * (m + 1) < 100) {
        throw ConfigError("cm_empirical_1d: " + std::to_string(n_cells * (m + 1))
                          + " cells do not resolve sin(20 pi x); need at least 100");
    }
    return cm_empirical_1d(m, n_cells, [](double x) { return std::sin(20.0 * std::numbers::pi * x); }, wrap);
}

HelmholtzConfig ExperimentConfig::helmholtz(int m, double eps_override) const
{
    HelmholtzConfig hc;
    hc.k = k;
    hc.eps = eps_override >= 0.0 ? eps_override : eps_value();
    hc.eta = eta > 0.0 ? eta : 0.0;
    hc.imaginary_penalty = imaginary_penalty;
    hc.degree = m;
    return hc;
}

void ExperimentConfig::validate() const
{
    if (!(k > 0.0)) {
        throw ConfigError("k must be positive");
    }
    if (m_list.empty() || n_list.empty()) {
        throw ConfigError("m and n lists must be non-empty");
    }
    for (int m : m_list) {
        if (m < 2 || m > 6) {
            throw ConfigError("m = " + std::to_string(m) + " outside [2, 6]");
        }
    }
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] < 1 || (i > 0 && n_list[i] <= n_list[i - 1])) {
            throw ConfigError("n list must be positive and strictly increasing");
        }
    }
    if (!(gmres.tol > 0.0) || gmres.max_iter < 1) {
        throw ConfigError("GMRES tolerance and iteration cap must be positive");
    }
}

double observed_order(double e_coarse, double e_fine, double refinement)
{
    const double floor = 1e2 * std::numeric_limits<double>::epsilon();
    if (!(e_coarse > floor) || !(e_fine > floor) || !(refinement > 1.0)) {
        return nan();
    }
    return std::log(e_coarse / e_fine) / std::log(refinement);
}

double loglog_interpolate(const std::vector<double>& x, const std::vector<double>& y, double x0)
{
    if (x.size() != y.size() || x.empty()) {
        throw DimensionError("loglog_interpolate: need matching, non-empty samples");
    }
    if (x.size() == 1) {
        return y[0];
    }
    std::vector<std::size_t> order(x.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(), [&x](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    const double lx = std::log(x0);
    std::size_t seg = 0;
    while (seg + 2 < order.size() && lx > std::log(x[order[seg + 1]])) {
        ++seg;
    }
    const double x1 = std::log(x[order[seg]]);
    const double x2 = std::log(x[order[seg + 1]]);
    const double y1 = std::log(y[order[seg]]);
    const double y2 = std::log(y[order[seg + 1]]);
    if (x1 == x2) {
        return std::exp(0.5 * (y1 + y2));
    }
    return std::exp(y1 + (lx - x1) * (y2 - y1) / (x2 - x1));
}

ResultTable run_convergence(const ExperimentConfig& cfg)
{
    cfg.validate();
    ResultTable t;
    t.columns = {"m",  "n",      "dofs",     "nnz",      "solver",  "iterations", "converged",
                 "l2", "dg",     "energy",   "order_l2", "order_dg", "order_energy", "status"};
    describe(t, cfg);
    t.set_meta("solution", cfg.solution);
    t.set_meta("direct_max_dofs", std::to_string(cfg.direct_max_dofs));

    for (int m : cfg.m_list) {
        const HelmholtzConfig hc = cfg.helmholtz(m);
        const ManufacturedSolution sol = make_solution(cfg, hc.eps);
        double prev_l2 = 0.0, prev_dg = 0.0, prev_en = 0.0;
        int prev_n = 0;
        for (int n : cfg.n_list) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const std::vector<TriMesh> meshes = nested_square_meshes(n);
                const TriMesh& mesh = meshes.back();
                const ReconstructionOperator op = reconstruction(mesh, m);
                const GlobalSystem sys = assemble_rda_system(mesh, op, hc, sol);
                const SolveOutcome s = solve(sys, meshes, hc, cfg);
                write_diagnostics(cfg, mesh, sys, s.iterative ? &s.report : nullptr);
                const ErrorReport e = compute_error_norms(mesh, reconstructed_space(op), s.x, &sol, hc);

                Cell o_l2, o_dg, o_en;
                if (prev_n > 0) {
                    const double r = static_cast<double>(n) / prev_n;
                    o_l2 = observed_order(prev_l2, e.l2, r);
                    o_dg = observed_order(prev_dg, e.dg, r);
                    o_en = observed_order(prev_en, e.energy, r);
                }
                const std::string status = s.converged ? "ok" : "not_converged";
                if (!s.converged) {
                    ++t.failed_rows;
                }
                t.add_row({m, n, static_cast<long long>(sys.size()), static_cast<long long>(count_nnz(sys.matrix)),
                           s.method, s.iterations, static_cast<long long>(s.converged), e.l2, e.dg, e.energy, o_l2,
                           o_dg, o_en, status});
                prev_l2 = e.l2;
                prev_dg = e.dg;
                prev_en = e.energy;
                prev_n = n;
            } catch (const Error& err) {
                ++t.failed_rows;
                prev_n = 0;
                t.add_row({m, n, {}, {}, {}, {}, 0LL, {}, {}, {}, {}, {}, {}, std::string("error: ") + err.what()});
            }
            log_timing("convergence m=" + std::to_string(m) + " n=" + std::to_string(n), seconds_since(t0));
        }
    }
    return t;
}

ResultTable run_dg_comparison(const ExperimentConfig& cfg)
{
    cfg.validate();
    ResultTable t;
    t.columns = {"m",       "n",         "rda_dofs",    "rda_nnz",   "rda_l2",   "dg_n_lo",
                 "dg_n_hi", "dg_l2_matched", "error_ratio", "dg_dofs_same_error", "dof_ratio", "nnz_ratio",
                 "status"};
    describe(t, cfg);
    t.set_meta("solution", cfg.solution);
    t.set_meta("matching",
               "DG error at the RDA DOF count and DG DOFs/nnz at the RDA error by piecewise-linear log-log "
               "interpolation over the DG meshes (end segments extrapolated); DG meshes n = floor and "
               "floor+1 of n / sqrt(dim P^m)");
    t.set_meta("dg_solver", "direct");

    for (int m : cfg.m_list) {
        const HelmholtzConfig hc = cfg.helmholtz(m);
        const ManufacturedSolution sol = make_solution(cfg, hc.eps);
        const double dim = dim_pm(m);

        std::map<int, std::pair<int, int>> bracket;
        std::vector<int> dg_levels;
        for (int n : cfg.n_list) {
            const int lo = std::max(1, static_cast<int>(std::floor(n / std::sqrt(dim) + 1e-12)));
            bracket[n] = {lo, lo + 1};
            dg_levels.push_back(lo);
            dg_levels.push_back(lo + 1);
        }
        std::sort(dg_levels.begin(), dg_levels.end());
        dg_levels.erase(std::unique(dg_levels.begin(), dg_levels.end()), dg_levels.end());

        std::vector<double> dg_dofs, dg_err, dg_nnz;
        std::string dg_failure;
        for (int nd : dg_levels) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const TriMesh mesh = uniform_square_mesh(nd);
                const GlobalSystem sys = assemble_dg_system(mesh, m, hc, sol);
                const Eigen::VectorXcd x = sparse_direct_solve(sys.matrix, sys.rhs);
                const ErrorReport e = compute_error_norms(mesh, discontinuous_space(mesh, m), x, &sol, hc);
                dg_dofs.push_back(static_cast<double>(sys.size()));
                dg_err.push_back(e.l2);
                dg_nnz.push_back(static_cast<double>(count_nnz(sys.matrix)));
            } catch (const Error& err) {
                dg_failure = err.what();
            }
            log_timing("compare-dg DG m=" + std::to_string(m) + " n=" + std::to_string(nd), seconds_since(t0));
        }

        for (int n : cfg.n_list) {
            const auto t0 = std::chrono::steady_clock::now();
            const auto [lo, hi] = bracket[n];
            try {
                if (!dg_failure.empty() || dg_dofs.size() < 2) {
                    throw NumericalError("DG reference failed: " + dg_failure);
                }
                const std::vector<TriMesh> meshes = nested_square_meshes(n);
                const TriMesh& mesh = meshes.back();
                const ReconstructionOperator op = reconstruction(mesh, m);
                const GlobalSystem sys = assemble_rda_system(mesh, op, hc, sol);
                const SolveOutcome s = solve(sys, meshes, hc, cfg);
                write_diagnostics(cfg, mesh, sys, s.iterative ? &s.report : nullptr);
                const double err = compute_error_norms(mesh, reconstructed_space(op), s.x, &sol, hc).l2;
                const double dofs = static_cast<double>(sys.size());
                const double nnz = static_cast<double>(count_nnz(sys.matrix));

                const double dg_matched = loglog_interpolate(dg_dofs, dg_err, dofs);
                const double dg_dofs_same = loglog_interpolate(dg_err, dg_dofs, err);
                const double dg_nnz_same = loglog_interpolate(dg_err, dg_nnz, err);
                if (!s.converged) {
                    ++t.failed_rows;
                }
                t.add_row({m, n, static_cast<long long>(dofs), static_cast<long long>(nnz), err, lo, hi, dg_matched,
                           err / dg_matched, dg_dofs_same, dofs / dg_dofs_same, nnz / dg_nnz_same,
                           std::string(s.converged ? "ok" : "not_converged")});
            } catch (const Error& e) {
                ++t.failed_rows;
                t.add_row({m, n, {}, {}, {}, lo, hi, {}, {}, {}, {}, {}, std::string("error: ") + e.what()});
            }
            log_timing("compare-dg RDA m=" + std::to_string(m) + " n=" + std::to_string(n), seconds_since(t0));
        }
    }
    return t;
}

ResultTable run_precond_study(const ExperimentConfig& cfg)
{
    cfg.validate();
    ResultTable t;
    t.columns = {"m",           "n",           "dofs",          "levels",         "iters_eps0",
                 "iters_ksq",   "counts",      "converged_eps0", "converged_ksq", "relres_eps0",
                 "relres_ksq",  "iters_unpreconditioned_ksq", "status"};
    describe(t, cfg);
    t.set_meta("eps", "0 and k^2");
    t.set_meta("solution", cfg.solution);
    t.set_meta("counts", "iterations(eps=0)/iterations(eps=k^2)");

    for (int m : cfg.m_list) {
        for (int n : cfg.n_list) {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const std::vector<TriMesh> meshes = nested_square_meshes(n);
                const TriMesh& mesh = meshes.back();
                const ReconstructionOperator op = reconstruction(mesh, m);
                const MultigridHierarchy h = build_hierarchy(meshes, cfg.helmholtz(m, 0.0), cfg.smoother);
                const LinearOperator precond = vcycle_preconditioner(h);

                int iters[2] = {0, 0};
                bool conv[2] = {false, false};
                double relres[2] = {0.0, 0.0};
                Cell unprec;
                for (int e = 0; e < 2; ++e) {
                    const HelmholtzConfig hc = cfg.helmholtz(m, e == 0 ? 0.0 : cfg.k * cfg.k);
                    const ManufacturedSolution sol = make_solution(cfg, hc.eps);
                    const GlobalSystem sys = assemble_rda_system(mesh, op, hc, sol);
                    const GmresResult r = gmres(sys.matrix, sys.rhs, precond, cfg.gmres);
                    iters[e] = r.report.iterations;
                    conv[e] = r.report.converged;
                    relres[e] = r.report.true_relative_residual;
                    write_diagnostics(cfg, mesh, sys, &r.report);
                    if (e == 1 && cfg.unpreconditioned_baseline) {
                        unprec = static_cast<long long>(
                            gmres(sys.matrix, sys.rhs, LinearOperator{}, cfg.gmres).report.iterations);
                    }
                }
                const bool ok = conv[0] && conv[1];
                if (!ok) {
                    ++t.failed_rows;
                }
                t.add_row({m, n, static_cast<long long>(mesh.num_elements()), h.num_levels(), iters[0], iters[1],
                           std::to_string(iters[0]) + "/" + std::to_string(iters[1]),
                           static_cast<long long>(conv[0]), static_cast<long long>(conv[1]), relres[0], relres[1],
                           unprec, std::string(ok ? "ok" : "not_converged")});
            } catch (const Error& e) {
                ++t.failed_rows;
                t.add_row({m, n, {}, {}, {}, {}, {}, 0LL, 0LL, {}, {}, {}, std::string("error: ") + e.what()});
            }
            log_timing("precond-study m=" + std::to_string(m) + " n=" + std::to_string(n), seconds_since(t0));
        }
    }
    return t;
}

ResultTable spectrum_report(const ExperimentConfig& cfg)
{
    cfg.validate();
    const int m = cfg.m_list.front();
    const int n = cfg.n_list.front();
    ResultTable t;
    t.columns = {"matrix", "re", "im"};
    describe(t, cfg);
    t.set_meta("m", std::to_string(m));
    t.set_meta("n", std::to_string(n));

    const TriMesh mesh = uniform_square_mesh(n);
    if (mesh.num_elements() > kMaxDenseSpectrumSize) {
        throw UnsupportedError("spectrum: " + std::to_string(mesh.num_elements()) + " unknowns exceed the dense cap "
                               + std::to_string(kMaxDenseSpectrumSize));
    }
    const HelmholtzConfig hc = cfg.helmholtz(m);
    const ReconstructionOperator op = reconstruction(mesh, m);
    const GlobalSystem sys = assemble_rda_system(mesh, op, hc, zero_solution());
    write_diagnostics(cfg, mesh, sys, nullptr);
    const Eigen::MatrixXcd a(sys.matrix);
    const Eigen::MatrixXcd p = Eigen::MatrixXd(assemble_p0_preconditioner(mesh, hc)).cast<Complex>();
    const Eigen::MatrixXcd pa = dense_solve(p, a);

    const auto add = [&t](const std::string& name, const Eigen::VectorXcd& ev) {
        for (Eigen::Index i = 0; i < ev.size(); ++i) {
            t.add_row({name, ev(i).real(), ev(i).imag()});
        }
        t.set_meta("min_abs_" + name, format_number(ev.cwiseAbs().minCoeff()));
        t.set_meta("max_abs_" + name, format_number(ev.cwiseAbs().maxCoeff()));
    };
    add("A", dense_spectrum(a));
    add("PinvA", dense_spectrum(pa));
    return t;
}

ResultTable cm_table(const std::vector<int>& m_list, int n_cells)
{
    ResultTable t;
    t.columns = {"m", "cm_theoretical", "cm_empirical", "rda_error", "dg_error", "n_cells"};
    t.set_meta("experiment", "cm-table");
    t.set_meta("version", kVersion);
    t.set_meta("g", "sin(20 pi x) on [0,1], periodic patches");
    t.set_meta("n_cells", std::to_string(n_cells));
    for (int m : m_list) {
        const Cm1dResult r = cm_empirical_1d(m, n_cells);
        t.add_row({m, cm_theoretical(m), r.ratio, r.rda_error, r.dg_error, n_cells});
    }
    return t;
}

} // namespace rda
