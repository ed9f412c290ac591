#include "rda/discrete_space.hpp"

namespace rda {

DiscreteSpace reconstructed_space(const ReconstructionOperator& op)
{
    DiscreteSpace space;
    space.kind = SpaceKind::reconstructed;
    space.degree = op.degree;
    space.num_dofs = op.num_elements();
    space.elements.resize(op.num_elements());
    for (int K = 0; K < op.num_elements(); ++K) {
        LocalBasis& b = space.elements[K];
        b.spec = op.local[K].spec;
        b.dofs = op.patches[K].members;
        b.coefficients = op.local[K].matrix;
    }
    return space;
}

DiscreteSpace discontinuous_space(const TriMesh& mesh, int m)
{
    DiscreteSpace space;
    space.kind = SpaceKind::discontinuous;
    space.degree = m;
    const int n = dim_pm(m);
    space.num_dofs = n * mesh.num_elements();
    space.elements.resize(mesh.num_elements());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        LocalBasis& b = space.elements[K];
        b.spec.degree = m;
        b.spec.center = mesh.barycenter[K];
        b.spec.scale = mesh.diameter[K];
        b.dofs.resize(n);
        for (int a = 0; a < n; ++a) {
            b.dofs[a] = K * n + a;
        }
        b.coefficients = Eigen::MatrixXd::Identity(n, n);
    }
    return space;
}

BasisTable basis_table(const LocalBasis& basis, const Eigen::Matrix<double, Eigen::Dynamic, 2>& points)
{
    const MonomialTable t = monomial_table(points, basis.spec);
    return {t.values * basis.coefficients, t.dx * basis.coefficients, t.dy * basis.coefficients};
}

} // namespace rda
