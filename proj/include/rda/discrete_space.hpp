#pragma once

#include <vector>

#include <Eigen/Core>

#include "rda/mesh.hpp"
#include "rda/polybasis.hpp"
#include "rda/reconstruction.hpp"

namespace rda {

/// Restriction of a piecewise-polynomial space to one element: the global
/// DOFs alive on K and the map from their values to monomial coefficients.
struct LocalBasis {
    PolySpec spec;
    std::vector<int> dofs;
    /// dim_pm(degree) x dofs.size().
    Eigen::MatrixXd coefficients;
};

enum class SpaceKind { reconstructed, discontinuous };

/// Either the reconstructed space U_h^m = R U_h^0 (one DOF per element) or
/// the broken space of all piecewise P^m (modal monomial DOFs).
struct DiscreteSpace {
    SpaceKind kind = SpaceKind::reconstructed;
    int degree = 0;
    int num_dofs = 0;
    std::vector<LocalBasis> elements;
};

DiscreteSpace reconstructed_space(const ReconstructionOperator& op);

/// Broken P^m with monomials centered at each barycenter, scaled by h_K.
/// degree 0 gives the piecewise constants U_h^0.
DiscreteSpace discontinuous_space(const TriMesh& mesh, int m);

/// Values and physical gradients of every local basis function at the
/// given points: one row per point, one column per local DOF.
struct BasisTable {
    Eigen::MatrixXd values;
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

BasisTable basis_table(const LocalBasis& basis, const Eigen::Matrix<double, Eigen::Dynamic, 2>& points);

} // namespace rda
