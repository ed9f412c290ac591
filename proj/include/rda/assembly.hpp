#pragma once

#include <functional>

#include <Eigen/Core>

#include "rda/discrete_space.hpp"
#include "rda/linsolve.hpp"
#include "rda/mesh.hpp"
#include "rda/reconstruction.hpp"

namespace rda {

using Vector2c = Eigen::Vector2cd;

/// Parameters of  -Δu - (k^2 - i eps) u = f,  ∂u/∂n + i k u = g  and of the
/// interior penalty discretization.
struct HelmholtzConfig {
    double k = 1.0;
    double eps = 0.0;
    /// Penalty scale; <= 0 selects 10 (m + 1)^2.
    double eta = 0.0;
    /// Penalty term carries the imaginary unit (i mu [u][v]) when true.
    bool imaginary_penalty = true;
    int degree = 2;
    /// Quadrature exactness; <= 0 selects 2m + 2.
    int quadrature = 0;

    double penalty() const { return eta > 0.0 ? eta : 10.0 * (degree + 1) * (degree + 1); }
    int quadrature_order() const { return quadrature > 0 ? quadrature : 2 * degree + 2; }
    /// Throws ConfigError unless k > 0, eps >= 0 and eta >= 0.
    void validate() const;
};

/// Exact solution with its source term and Robin data.
struct ManufacturedSolution {
    std::function<Complex(const Point2&)> u;
    std::function<Vector2c(const Point2&)> grad;
    std::function<Complex(const Point2&)> f;
    /// g(x, n) = ∂u/∂n + i k u for the outward unit normal n.
    std::function<Complex(const Point2&, const Point2&)> g;
};

/// Builds f and g from u, ∇u and Δu for the given k and eps.
ManufacturedSolution make_manufactured_solution(std::function<Complex(const Point2&)> u,
                                                std::function<Vector2c(const Point2&)> grad,
                                                std::function<Complex(const Point2&)> laplacian, double k,
                                                double eps);

/// u = exp(i k (x cos θ + y sin θ)).
ManufacturedSolution plane_wave_solution(double k, double eps, double angle = 0.6283185307179586);

/// u = cos(k r)/k - (cos k + i sin k) / (k (J0(k) + i J1(k))) J0(k r),
/// r = |x - (1/2, 1/2)|, with source f = sin(k r)/r + i eps u.
ManufacturedSolution bessel_solution(double k, double eps = 0.0);

/// Global polynomial sum_a c_a x^i y^j in graded-lex monomial order.
ManufacturedSolution polynomial_solution(const Eigen::VectorXcd& coefficients, double k, double eps);

ManufacturedSolution zero_solution();

struct GlobalSystem {
    SparseComplexMatrix matrix;
    Eigen::VectorXcd rhs;

    Eigen::Index size() const { return matrix.rows(); }
    Eigen::Index nnz() const { return matrix.nonZeros(); }
};

/// a_h(λ_j, λ_i) and l_h(λ_i) on an arbitrary discrete space.
GlobalSystem assemble_system(const TriMesh& mesh, const DiscreteSpace& space, const HelmholtzConfig& cfg,
                             const ManufacturedSolution& sol);

/// RDA system on U_h^m = R U_h^0; one unknown per element.
GlobalSystem assemble_rda_system(const TriMesh& mesh, const ReconstructionOperator& recon,
                                 const HelmholtzConfig& cfg, const ManufacturedSolution& sol);

/// Conventional interior penalty DG on broken P^m with modal DOFs.
GlobalSystem assemble_dg_system(const TriMesh& mesh, int m, const HelmholtzConfig& cfg,
                                const ManufacturedSolution& sol);

/// Lowest-order form a_h^0 on U_h^0: η/h jump penalty on interior faces,
/// k^2 mass and k boundary mass. Real symmetric positive definite.
SparseRealMatrix assemble_p0_preconditioner(const TriMesh& mesh, const HelmholtzConfig& cfg);

/// Norms of u - u_h. Term fields hold squared contributions.
struct ErrorReport {
    double l2 = 0.0;
    double dg = 0.0;
    double energy = 0.0;
    double volume_gradient = 0.0;
    double interior_jump = 0.0;
    double boundary = 0.0;
    double face_average = 0.0;
};

/// With `sol == nullptr` the exact solution is taken as zero, giving the
/// norms of u_h itself.
ErrorReport compute_error_norms(const TriMesh& mesh, const DiscreteSpace& space, const Eigen::VectorXcd& uh,
                                const ManufacturedSolution* sol, const HelmholtzConfig& cfg);

/// Discrete sesquilinear form a_h(u, λ_i) for an exact function u (its
/// interior jumps vanish), evaluated by the assembly quadrature. Used to
/// check Galerkin orthogonality.
Eigen::VectorXcd exact_form_against_basis(const TriMesh& mesh, const DiscreteSpace& space,
                                          const HelmholtzConfig& cfg, const ManufacturedSolution& sol);

} // namespace rda
