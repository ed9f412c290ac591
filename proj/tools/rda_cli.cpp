#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rda/experiments.hpp"

namespace {

struct Shared {
    std::string out;
    std::string format = "csv";
    double tol = 1e-8;
    int max_iter = 2000;
    int restart = 0;
    std::string penalty_imag = "on";
    std::string smoother = "jacobi";
    std::string solver = "auto";
    std::string dump_matrix;
    std::string trace_residual;
    std::string dump_mesh;
};

void add_shared(CLI::App* app, Shared& s)
{
    app->add_option("--out", s.out, "Output file (default: standard output)");
    app->add_option("--format", s.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--tol", s.tol, "GMRES relative tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", s.max_iter, "GMRES iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--restart", s.restart, "GMRES restart length (0 = full)")->check(CLI::NonNegativeNumber);
    app->add_option("--penalty-imag", s.penalty_imag, "Imaginary interior penalty")
        ->check(CLI::IsMember({"on", "off"}));
    app->add_option("--smoother", s.smoother, "Multigrid smoother")->check(CLI::IsMember({"jacobi", "gs"}));
    app->add_option("--solver", s.solver, "auto, direct or gmres")->check(CLI::IsMember({"auto", "direct", "gmres"}));
    app->add_option("--dump-matrix", s.dump_matrix, "Write the last system matrix (Matrix Market)");
    app->add_option("--trace-residual", s.trace_residual, "Write the last GMRES residual history (CSV)");
    app->add_option("--dump-mesh", s.dump_mesh, "Write the last mesh");
}

void apply_shared(const Shared& s, rda::ExperimentConfig& cfg)
{
    cfg.gmres.tol = s.tol;
    cfg.gmres.max_iter = s.max_iter;
    cfg.gmres.restart = s.restart;
    cfg.imaginary_penalty = s.penalty_imag == "on";
    cfg.smoother.kind = s.smoother == "gs" ? rda::SmootherKind::gauss_seidel : rda::SmootherKind::jacobi;
    cfg.solver = s.solver == "direct"  ? rda::SolverChoice::direct
                 : s.solver == "gmres" ? rda::SolverChoice::gmres
                                       : rda::SolverChoice::automatic;
    cfg.dump_matrix = s.dump_matrix;
    cfg.trace_residual = s.trace_residual;
    cfg.dump_mesh = s.dump_mesh;
}

int emit(const rda::ResultTable& table, const Shared& s)
{
    const auto format = s.format == "json" ? rda::TableFormat::json : rda::TableFormat::csv;
    if (s.out.empty()) {
        rda::write_table(std::cout, table, format);
    } else {
        rda::write_table(s.out, table, format);
    }
    if (table.failed_rows > 0) {
        std::fprintf(stderr, "%d of %zu rows failed\n", table.failed_rows, table.rows.size());
    }
    return std::min(table.failed_rows, 255);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Reconstructed discontinuous approximation for the Helmholtz equation"};
    app.require_subcommand(1);

    Shared shared;
    rda::ExperimentConfig cfg;
    std::string eps = "zero";

    std::vector<int> cm_m{2, 3, 4, 5, 6};
    int cm_cells = 40;
    auto* cm = app.add_subcommand("cm-table", "1D efficiency constants C_m, theory and sin(20 pi x) test");
    cm->add_option("--m", cm_m, "Degrees")->delimiter(',');
    cm->add_option("--cells", cm_cells, "Coarse cells in the 1D test")->check(CLI::PositiveNumber);
    cm->add_option("--out", shared.out, "Output file");
    cm->add_option("--format", shared.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    const auto add_problem = [&](CLI::App* sub, double k, std::vector<int> m, std::vector<int> n) {
        cfg.k = k;
        cfg.m_list = std::move(m);
        cfg.n_list = std::move(n);
        sub->add_option("--k", cfg.k, "Wavenumber")->check(CLI::PositiveNumber);
        sub->add_option("--m", cfg.m_list, "Degrees")->delimiter(',');
        sub->add_option("--n", cfg.n_list, "Mesh resolutions (strictly increasing)")->delimiter(',');
        sub->add_option("--eta", cfg.eta, "Penalty scale (default 10(m+1)^2)")->check(CLI::PositiveNumber);
        add_shared(sub, shared);
    };

    bool expensive = false;
    auto* conv = app.add_subcommand("convergence", "Error study on refined meshes");
    conv->add_option("--eps", eps, "Absorption: zero or ksq")->check(CLI::IsMember({"zero", "ksq"}));
    conv->add_option("--solution", cfg.solution, "plane or bessel")->check(CLI::IsMember({"plane", "bessel"}));
    conv->add_flag("--expensive", expensive, "Large-wavenumber Bessel run (defaults k=40, m=2, n=160)");

    auto* cmp = app.add_subcommand("compare-dg", "RDA versus conventional DG at matched DOFs");
    auto* pre = app.add_subcommand("precond-study", "PGMRES iteration counts, eps = 0 and k^2");
    pre->add_flag("--baseline", cfg.unpreconditioned_baseline, "Also run unpreconditioned GMRES");
    auto* spec = app.add_subcommand("spectrum", "Eigenvalues of A_eps and P^{-1} A_eps");
    spec->add_option("--eps", eps, "Absorption: zero or ksq")->check(CLI::IsMember({"zero", "ksq"}));

    // All problem subcommands bind the same fields; only the parsed one writes them.
    for (auto* sub : {conv, cmp, pre, spec}) {
        add_problem(sub, 5.0, {2}, {10, 20, 40});
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (cm->parsed()) {
            return emit(rda::cm_table(cm_m, cm_cells), shared);
        }
        const auto given = [](CLI::App* sub, const char* name) { return sub->count(name) > 0; };
        apply_shared(shared, cfg);
        cfg.eps = eps == "ksq" ? rda::EpsMode::ksq : rda::EpsMode::zero;

        if (conv->parsed()) {
            cfg.name = "convergence";
            if (expensive) {
                cfg.name = "convergence-expensive";
                if (!given(conv, "--solution")) cfg.solution = "bessel";
                if (!given(conv, "--k")) cfg.k = 40.0;
                if (!given(conv, "--m")) cfg.m_list = {2};
                if (!given(conv, "--n")) cfg.n_list = {160};
            }
            return emit(rda::run_convergence(cfg), shared);
        }
        if (cmp->parsed()) {
            cfg.name = "compare-dg";
            if (!given(cmp, "--k")) cfg.k = 20.0;
            if (!given(cmp, "--m")) cfg.m_list = {2, 3, 4};
            return emit(rda::run_dg_comparison(cfg), shared);
        }
        if (pre->parsed()) {
            cfg.name = "precond-study";
            return emit(rda::run_precond_study(cfg), shared);
        }
        cfg.name = "spectrum";
        if (!given(spec, "--k")) cfg.k = 10.0;
        if (!given(spec, "--m")) cfg.m_list = {3};
        if (!given(spec, "--n")) cfg.n_list = {4};
        if (!given(spec, "--eps")) cfg.eps = rda::EpsMode::ksq;
        return emit(rda::spectrum_report(cfg), shared);
    } catch (const rda::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
