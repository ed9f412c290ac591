#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rda/assembly.hpp"
#include "rda/linsolve.hpp"
#include "rda/multigrid.hpp"
#include "rda/result_table.hpp"

namespace rda {

/// sqrt((m+1) ∫_K w^2 / ∫_0^{m+1} w^2) with w(x) = prod_{i=0}^{m} (x - i - 1/2)
/// and K = [floor(m/2), floor(m/2) + 1]. Integrals are exact (Gauss-Legendre).
double cm_theoretical(int m);

enum class PatchWrap {
    /// Patches wrap around [0, 1]; every patch is centred on its cell.
    periodic,
    /// Patches near the ends are shifted inwards.
    one_sided,
};

struct Cm1dResult {
    /// ||g - Rg|| / ||g - Ig||, or 0 when both errors vanish.
    double ratio = 0.0;
    double rda_error = 0.0;
    double dg_error = 0.0;
    /// Both errors <= 1e-12: g is reproduced exactly and the ratio is undefined.
    bool exact_reproduction = false;
};

/// One-dimensional comparison on [0, 1] with `n_cells` DG cells of width h and
/// n_cells (m+1) RDA cells of width h/(m+1). The RDA value on a cell is the
/// degree-m interpolant through the midpoints of m+1 consecutive cells, with
/// the cell at position floor(m/2); the DG value is the degree-m interpolant
/// through the m+1 sub-cell midpoints of its cell.
Cm1dResult cm_empirical_1d(int m, int n_cells, const std::function<double(double)>& g,
                           PatchWrap wrap = PatchWrap::periodic);

/// g = sin(20 pi x). Throws ConfigError unless n_cells (m+1) >= 100 (ten
/// cells per wavelength).
Cm1dResult cm_empirical_1d(int m, int n_cells, PatchWrap wrap = PatchWrap::periodic);

enum class EpsMode { zero, ksq };
enum class SolverChoice { automatic, direct, gmres };

struct ExperimentConfig {
    std::string name;
    double k = 5.0;
    EpsMode eps = EpsMode::zero;
    std::vector<int> m_list{2};
    std::vector<int> n_list{10, 20, 40};
    /// <= 0 keeps the default 10 (m+1)^2.
    double eta = 0.0;
    bool imaginary_penalty = true;
    GmresOptions gmres;
    SolverChoice solver = SolverChoice::automatic;
    /// Largest system solved directly under SolverChoice::automatic.
    int direct_max_dofs = 20000;
    SmootherOptions smoother;
    /// "plane" (u = exp(i k d.x), d at angle pi/5) or "bessel".
    std::string solution = "plane";
    /// Also run unpreconditioned GMRES in the preconditioner study.
    bool unpreconditioned_baseline = false;
    // Diagnostics written for the last system solved (empty = off).
    std::string dump_matrix;
    std::string trace_residual;
    std::string dump_mesh;

    double eps_value() const { return eps == EpsMode::ksq ? k * k : 0.0; }
    HelmholtzConfig helmholtz(int m, double eps_override = -1.0) const;
    /// Throws ConfigError unless k > 0, n_list is strictly increasing and
    /// positive, and every m lies in [2, 6].
    void validate() const;
};

/// log(e_coarse / e_fine) / log(refinement); NaN unless both errors exceed
/// 1e2 machine epsilon.
double observed_order(double e_coarse, double e_fine, double refinement = 2.0);

/// Piecewise-linear interpolation of log y against log x through the sorted
/// samples (x_i, y_i), extrapolating along the end segments.
double loglog_interpolate(const std::vector<double>& x, const std::vector<double>& y, double x0);

/// Error study on refined meshes: one row per (m, n) with L2, DG and energy
/// errors and observed orders against the previous n.
ResultTable run_convergence(const ExperimentConfig& cfg);

/// RDA versus modal DG at matched DOF counts. For every RDA row the DG error
/// is log-log interpolated between the DG meshes bracketing the same DOF
/// count; DOF and nnz ratios at matched accuracy come from the DG
/// error-versus-DOF curve.
ResultTable run_dg_comparison(const ExperimentConfig& cfg);

/// PGMRES iteration counts with the V-cycle on P, for eps = 0 and eps = k^2.
ResultTable run_precond_study(const ExperimentConfig& cfg);

/// Eigenvalues of A_eps and P^{-1} A_eps for the first (m, n) of the config
/// (columns matrix, re, im); summary statistics in the metadata.
ResultTable spectrum_report(const ExperimentConfig& cfg);

/// cm_theoretical and cm_empirical_1d for every m of the config, on
/// `n_cells` coarse cells.
ResultTable cm_table(const std::vector<int>& m_list, int n_cells = 40);

} // namespace rda
