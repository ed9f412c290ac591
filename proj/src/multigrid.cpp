#include "rda/multigrid.hpp"

#include <cmath>

namespace rda {

namespace {

Eigen::VectorXcd apply_real(const SparseRealMatrix& a, const Eigen::VectorXcd& x)
{
    Eigen::VectorXcd y(a.rows());
    for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
        Complex s = 0.0;
        for (SparseRealMatrix::InnerIterator it(a, i); it; ++it) {
            s += it.value() * x(it.col());
        }
        y(i) = s;
    }
    return y;
}

void gauss_seidel_sweep(const SparseRealMatrix& a, const Eigen::VectorXd& inv_diag, const Eigen::VectorXcd& b,
                        Eigen::VectorXcd& x, bool forward)
{
    const Eigen::Index n = a.rows();
    for (Eigen::Index step = 0; step < n; ++step) {
        const Eigen::Index i = forward ? step : n - 1 - step;
        Complex s = b(i);
        for (SparseRealMatrix::InnerIterator it(a, i); it; ++it) {
            s -= it.value() * x(it.col());
        }
        x(i) += s * inv_diag(i);
    }
}

void smooth(const MultigridHierarchy& h, int level, const Eigen::VectorXcd& b, Eigen::VectorXcd& x, int sweeps,
            bool forward)
{
    const SparseRealMatrix& a = h.operators[level];
    const Eigen::VectorXd& d = h.inverse_diagonal[level];
    for (int s = 0; s < sweeps; ++s) {
        if (h.smoother.kind == SmootherKind::gauss_seidel) {
            gauss_seidel_sweep(a, d, b, x, forward);
        } else {
            x += h.smoother.damping * d.cwiseProduct(b - apply_real(a, x));
        }
    }
}

Eigen::VectorXcd coarse_solve(const MultigridHierarchy& h, const Eigen::VectorXcd& b)
{
    const Eigen::VectorXd re = h.coarse.solve(b.real());
    const Eigen::VectorXd im = h.coarse.solve(b.imag());
    Eigen::VectorXcd x(b.size());
    x.real() = re;
    x.imag() = im;
    return x;
}

Eigen::VectorXcd cycle(const MultigridHierarchy& h, int level, const Eigen::VectorXcd& b)
{
    if (level == 0) {
        return coarse_solve(h, b);
    }
    const std::vector<int>& parent = h.parent[level];
    const Eigen::Index nc = h.operators[level - 1].rows();

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(b.size());
    smooth(h, level, b, x, h.smoother.pre, true);

    const Eigen::VectorXcd r = b - apply_real(h.operators[level], x);
    Eigen::VectorXcd rc = Eigen::VectorXcd::Zero(nc);
    for (Eigen::Index i = 0; i < r.size(); ++i) {
        rc(parent[i]) += r(i);
    }
    const Eigen::VectorXcd ec = cycle(h, level - 1, rc);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        x(i) += ec(parent[i]);
    }

    smooth(h, level, b, x, h.smoother.post, false);
    return x;
}

} // namespace

MultigridHierarchy build_hierarchy(const std::vector<TriMesh>& meshes, const HelmholtzConfig& cfg,
                                   const SmootherOptions& smoother)
{
    if (meshes.empty()) {
        throw ConfigError("build_hierarchy: no mesh levels");
    }
    if (!(smoother.damping > 0.0) || smoother.pre < 0 || smoother.post < 0) {
        throw ConfigError("build_hierarchy: invalid smoother parameters");
    }
    MultigridHierarchy h;
    h.smoother = smoother;
    for (std::size_t l = 0; l < meshes.size(); ++l) {
        const TriMesh& mesh = meshes[l];
        if (l == 0) {
            h.parent.emplace_back();
        } else {
            const TriMesh& coarse = meshes[l - 1];
            if (mesh.num_elements() != 4 * coarse.num_elements()
                || static_cast<int>(mesh.parent.size()) != mesh.num_elements()) {
                throw TopologyError("build_hierarchy: level " + std::to_string(l)
                                    + " is not a red refinement of the previous level");
            }
            for (int K = 0; K < mesh.num_elements(); ++K) {
                const int p = mesh.parent[K];
                if (p < 0 || p >= coarse.num_elements()
                    || !point_in_triangle(mesh.barycenter[K], coarse.corners(p))) {
                    throw TopologyError("build_hierarchy: element " + std::to_string(K) + " on level "
                                        + std::to_string(l) + " does not lie in its parent");
                }
            }
            h.parent.push_back(mesh.parent);
        }
        h.operators.push_back(assemble_p0_preconditioner(mesh, cfg));
        h.inverse_diagonal.push_back(h.operators.back().diagonal().cwiseInverse());
    }
    h.coarse.compute(Eigen::MatrixXd(h.operators.front()));
    if (h.coarse.info() != Eigen::Success) {
        throw NumericalError("build_hierarchy: coarse operator is not positive definite");
    }
    return h;
}

Eigen::VectorXcd vcycle_apply(const MultigridHierarchy& h, const Eigen::VectorXcd& r)
{
    if (r.size() != h.size()) {
        throw DimensionError("vcycle_apply: vector has " + std::to_string(r.size()) + " entries, finest level has "
                             + std::to_string(h.size()));
    }
    return cycle(h, h.num_levels() - 1, r);
}

LinearOperator vcycle_preconditioner(const MultigridHierarchy& h)
{
    return [&h](const Eigen::VectorXcd& r) { return vcycle_apply(h, r); };
}

double galerkin_defect(const MultigridHierarchy& h, int level)
{
    if (level < 1 || level >= h.num_levels()) {
        throw ConfigError("galerkin_defect: level must lie in [1, levels)");
    }
    const std::vector<int>& parent = h.parent[level];
    const Eigen::Index nc = h.operators[level - 1].rows();
    Eigen::MatrixXd triple = Eigen::MatrixXd::Zero(nc, nc);
    const SparseRealMatrix& a = h.operators[level];
    for (Eigen::Index i = 0; i < a.outerSize(); ++i) {
        for (SparseRealMatrix::InnerIterator it(a, i); it; ++it) {
            triple(parent[i], parent[it.col()]) += it.value();
        }
    }
    const Eigen::MatrixXd coarse(h.operators[level - 1]);
    return (triple - coarse).norm() / coarse.norm();
}

int vcycle_iterate(const MultigridHierarchy& h, const Eigen::VectorXcd& z, Eigen::VectorXcd& y, double tol,
                   int max_cycles)
{
    const SparseRealMatrix& a = h.operators.back();
    y = Eigen::VectorXcd::Zero(z.size());
    const double znorm = z.norm();
    if (znorm == 0.0) {
        return 0;
    }
    for (int c = 1; c <= max_cycles; ++c) {
        const Eigen::VectorXcd r = z - apply_real(a, y);
        y += vcycle_apply(h, r);
        if ((z - apply_real(a, y)).norm() <= tol * znorm) {
            return c;
        }
    }
    return -1;
}

} // namespace rda
