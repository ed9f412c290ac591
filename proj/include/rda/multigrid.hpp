#pragma once

#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "rda/assembly.hpp"
#include "rda/linsolve.hpp"
#include "rda/mesh.hpp"

namespace rda {

enum class SmootherKind { jacobi, gauss_seidel };

struct SmootherOptions {
    int pre = 2;
    int post = 2;
    double damping = 0.8;
    /// Gauss-Seidel runs forward sweeps before and backward sweeps after
    /// the coarse correction, so the cycle stays symmetric.
    SmootherKind kind = SmootherKind::jacobi;
};

/// Geometric multigrid for the piecewise-constant operator P on nested meshes.
/// Level 0 is the coarsest. Prolongation is injection from the parent
/// element; restriction is its transpose (sum over children).
struct MultigridHierarchy {
    std::vector<SparseRealMatrix> operators;
    /// parent[l][i]: parent on level l - 1 of element i on level l (parent[0] is empty).
    std::vector<std::vector<int>> parent;
    std::vector<Eigen::VectorXd> inverse_diagonal;
    Eigen::LLT<Eigen::MatrixXd> coarse;
    SmootherOptions smoother;

    int num_levels() const { return static_cast<int>(operators.size()); }
    Eigen::Index size() const { return operators.empty() ? 0 : operators.back().rows(); }
};

/// Assembles P on every level of `meshes` (coarse to fine). Throws
/// TopologyError unless each mesh is the red refinement of its predecessor.
MultigridHierarchy build_hierarchy(const std::vector<TriMesh>& meshes, const HelmholtzConfig& cfg,
                                   const SmootherOptions& smoother = {});

/// One V(pre, post) cycle approximating P^{-1} r on the finest level.
Eigen::VectorXcd vcycle_apply(const MultigridHierarchy& h, const Eigen::VectorXcd& r);

/// `vcycle_apply` as a fixed linear operator for GMRES.
LinearOperator vcycle_preconditioner(const MultigridHierarchy& h);

/// Frobenius norm of R P_{l} R^T - P_{l-1} relative to ||P_{l-1}||_F, with R the
/// restriction from level l. Rediscretized operators are not Galerkin
/// products, so this is a diagnostic only.
double galerkin_defect(const MultigridHierarchy& h, int level);

/// Solves P y = z by repeated V-cycles from y = 0. Returns the number of
/// cycles used, or -1 if `max_cycles` did not reach ||z - P y|| <= tol ||z||.
int vcycle_iterate(const MultigridHierarchy& h, const Eigen::VectorXcd& z, Eigen::VectorXcd& y, double tol,
                   int max_cycles);

} // namespace rda
