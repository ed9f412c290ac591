#pragma once

#include <vector>

#include <Eigen/Core>

#include "rda/error.hpp"
#include "rda/mesh.hpp"
#include "rda/polybasis.hpp"

namespace rda {

/// Element patch S(K) and its collocation set I(K).
struct ElementPatch {
    int owner = -1;
    /// Members ordered by recursion round, then element index; members[0] == owner.
    std::vector<int> members;
    /// Barycenters of the members, one row per member.
    Eigen::Matrix<double, Eigen::Dynamic, 2> collocation;
    /// Number of neighbour-closure rounds taken.
    int depth = 0;
    /// Largest distance between two corners of member elements.
    double diameter = 0.0;

    int size() const { return static_cast<int>(members.size()); }
};

/// Grows S(K) by whole face-neighbour rounds until it holds at least
/// `target` elements. Throws PatchGrowthError if the mesh runs out.
ElementPatch build_patch(const TriMesh& mesh, int element, int target);

/// Patch-size threshold #S for degree m (two dimensions, 2 <= m <= 6).
int patch_size_table(int m, int dim = 2);

/// Local operator of one element: coefficients = matrix * (patch values).
struct LocalReconstruction {
    /// Scaled monomials centered at x_K, scaled by the patch diameter.
    PolySpec spec;
    /// dim_pm(m) x #S(K).
    Eigen::MatrixXd matrix;
};

/// Solves  min sum_{x in I(K)} |p(x) - g(x)|^2  s.t.  p(x_K) = g(x_K)
/// for all data vectors g at once. The constraint is eliminated by
/// centering the monomials at x_K; the remaining problem is solved with a
/// column-pivoted QR. Throws UnisolvenceError if the reduced Vandermonde
/// matrix is rank deficient.
LocalReconstruction fit_constrained_ls(const ElementPatch& patch, int m);

struct LambdaEstimate {
    /// Lower bound of max_p max_{S(K)}|p| / max_{I(K)}|p|.
    double lambda = 1.0;
    /// 1 + lambda * sqrt(#S(K)).
    double companion = 1.0;
};

/// Sampling estimate of the patch stability constant. `samples` points are
/// placed in every member element (nested in `samples`), and the collocation
/// points are always included, so the estimate is >= 1 and nondecreasing in
/// `samples`.
LambdaEstimate estimate_lambda(const TriMesh& mesh, const ElementPatch& patch, int m, int samples);

struct ReconstructionOptions {
    /// Patch size threshold; 0 selects patch_size_table(m).
    int patch_size = 0;
    bool estimate_lambda = true;
    int lambda_samples = 30;
};

/// Global operator R mapping one value per element to piecewise P^m.
struct ReconstructionOperator {
    int degree = 0;
    std::vector<ElementPatch> patches;
    std::vector<LocalReconstruction> local;
    /// Per-element Lambda(m, S(K)) estimates (empty when not requested).
    std::vector<double> lambda;
    /// max_K (1 + Lambda(m, S(K)) sqrt(#S(K))), or 0 when not estimated.
    double lambda_m = 0.0;

    int num_elements() const { return static_cast<int>(patches.size()); }
};

ReconstructionOperator build_reconstruction_operator(const TriMesh& mesh, int m,
                                                     const ReconstructionOptions& options = {});

/// Applies R to per-element values. Column K of the result holds the
/// scaled-monomial coefficients of (R v)|_K in the frame local[K].spec.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
reconstruct_from_point_values(const ReconstructionOperator& op, const Eigen::MatrixBase<Derived>& values)
{
    using Scalar = typename Derived::Scalar;
    if (values.size() != op.num_elements()) {
        throw DimensionError("reconstruct_from_point_values: expected " + std::to_string(op.num_elements())
                             + " values, got " + std::to_string(values.size()));
    }
    const int n = dim_pm(op.degree);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> coeffs(n, op.num_elements());
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> local;
    for (int K = 0; K < op.num_elements(); ++K) {
        const auto& members = op.patches[K].members;
        local.resize(static_cast<Eigen::Index>(members.size()));
        for (std::size_t j = 0; j < members.size(); ++j) {
            local(static_cast<Eigen::Index>(j)) = values(members[j]);
        }
        coeffs.col(K) = op.local[K].matrix.template cast<Scalar>() * local;
    }
    return coeffs;
}

/// Evaluates the element-K polynomial with coefficient column `coeffs` at x.
template <typename Derived>
typename Derived::Scalar evaluate_polynomial(const PolySpec& spec, const Eigen::MatrixBase<Derived>& coeffs,
                                             const Point2& x)
{
    const MonomialValues mv = eval_scaled_monomials(x, spec);
    return mv.values.template cast<typename Derived::Scalar>().dot(coeffs);
}

/// Values of a function at the element barycenters.
template <typename Fn>
auto sample_at_barycenters(const TriMesh& mesh, Fn&& fn)
{
    using Scalar = decltype(fn(Point2()));
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v(mesh.num_elements());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        v(K) = fn(mesh.barycenter[K]);
    }
    return v;
}

} // namespace rda
