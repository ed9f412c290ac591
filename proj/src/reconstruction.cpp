#include "rda/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace rda {

ElementPatch build_patch(const TriMesh& mesh, int element, int target)
{
    ElementPatch patch;
    patch.owner = element;
    patch.members.push_back(element);
    std::vector<char> inside(mesh.num_elements(), 0);
    inside[element] = 1;

    std::vector<int> frontier{element};
    while (patch.size() < target) {
        std::vector<int> next;
        for (int K : frontier) {
            for (int nb : mesh.neighbors(K)) {
                if (!inside[nb]) {
                    inside[nb] = 1;
                    next.push_back(nb);
                }
            }
        }
        if (next.empty()) {
            throw PatchGrowthError("patch of element " + std::to_string(element) + " stops at "
                                   + std::to_string(patch.size()) + " members, target "
                                   + std::to_string(target));
        }
        std::sort(next.begin(), next.end());
        patch.members.insert(patch.members.end(), next.begin(), next.end());
        frontier = std::move(next);
        ++patch.depth;
    }

    patch.collocation.resize(patch.size(), 2);
    std::vector<Point2> corners;
    corners.reserve(3 * patch.members.size());
    for (int j = 0; j < patch.size(); ++j) {
        const int K = patch.members[j];
        patch.collocation.row(j) = mesh.barycenter[K].transpose();
        for (const Point2& c : mesh.corners(K)) {
            corners.push_back(c);
        }
    }
    for (std::size_t a = 0; a < corners.size(); ++a) {
        for (std::size_t b = a + 1; b < corners.size(); ++b) {
            patch.diameter = std::max(patch.diameter, (corners[a] - corners[b]).norm());
        }
    }
    return patch;
}

int patch_size_table(int m, int dim)
{
    if (dim == 2 && m >= 2 && m <= 6) {
        static constexpr int table[] = {9, 16, 21, 29, 38};
        return table[m - 2];
    }
    if (dim == 3 && m >= 2 && m <= 4) {
        static constexpr int table[] = {13, 28, 40};
        return table[m - 2];
    }
    throw UnsupportedError("no patch size tabulated for m = " + std::to_string(m) + ", dim = "
                           + std::to_string(dim));
}

LocalReconstruction fit_constrained_ls(const ElementPatch& patch, int m)
{
    LocalReconstruction out;
    out.spec.degree = m;
    out.spec.center = patch.collocation.row(0).transpose();
    out.spec.scale = patch.diameter > 0.0 ? patch.diameter : 1.0;

    const int n = out.spec.dim();
    const int s = patch.size();
    out.matrix = Eigen::MatrixXd::Zero(n, s);
    out.matrix(0, 0) = 1.0;
    if (n == 1) {
        return out;
    }
    if (s - 1 < n - 1) {
        throw UnisolvenceError(patch.owner, "element " + std::to_string(patch.owner) + ": patch has "
                                                + std::to_string(s) + " points, degree "
                                                + std::to_string(m) + " needs "
                                                + std::to_string(n));
    }

    // Every non-constant centered monomial vanishes at x_K, so the constant
    // coefficient is g_K and the rest fit g_j - g_K on the other members.
    const MonomialTable table = monomial_table(patch.collocation.bottomRows(s - 1), out.spec);
    const Eigen::MatrixXd reduced = table.values.rightCols(n - 1);

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(reduced);
    qr.setThreshold(1e-10);
    if (qr.rank() < n - 1) {
        throw UnisolvenceError(patch.owner, "element " + std::to_string(patch.owner)
                                                + ": collocation points are not unisolvent for degree "
                                                + std::to_string(m));
    }

    Eigen::MatrixXd differences = Eigen::MatrixXd::Zero(s - 1, s);
    differences.col(0).setConstant(-1.0);
    differences.rightCols(s - 1).setIdentity();
    out.matrix.bottomRows(n - 1) = qr.solve(differences);
    return out;
}

namespace {

double radical_inverse(unsigned i, unsigned base)
{
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * (i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

// i-th point of a nested low-discrepancy sequence inside the triangle.
Point2 triangle_sample(const std::array<Point2, 3>& c, unsigned i)
{
    double u = radical_inverse(i, 2);
    double v = radical_inverse(i, 3);
    if (u + v > 1.0) {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    return c[0] + u * (c[1] - c[0]) + v * (c[2] - c[0]);
}

} // namespace

LambdaEstimate estimate_lambda(const TriMesh& mesh, const ElementPatch& patch, int m, int samples)
{
    PolySpec spec;
    spec.degree = m;
    spec.center = patch.collocation.row(0).transpose();
    spec.scale = patch.diameter > 0.0 ? patch.diameter : 1.0;
    const int n = spec.dim();
    const int s = patch.size();

    // Trial polynomials: the constant, the generalized eigenvectors of the
    // patch L2 Gram matrix against the collocation Gram matrix, and a fixed
    // set of random coefficient vectors.
    const Eigen::MatrixXd vx = monomial_table(patch.collocation, spec).values;
    const Eigen::MatrixXd gram_x = vx.transpose() * vx;
    Eigen::MatrixXd gram_s = Eigen::MatrixXd::Zero(n, n);
    const TriangleRule rule = triangle_quadrature(2 * m);
    for (int K : patch.members) {
        const MappedRule q = map_to_triangle(rule, mesh.corners(K));
        const Eigen::MatrixXd v = monomial_table(q.points, spec).values;
        gram_s += v.transpose() * q.weights.asDiagonal() * v;
    }

    constexpr int kRandomTrials = 16;
    Eigen::MatrixXd trials(n, 1 + n + kRandomTrials);
    trials.col(0) = Eigen::VectorXd::Unit(n, 0);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(gram_s, gram_x);
    if (ges.info() == Eigen::Success) {
        trials.middleCols(1, n) = ges.eigenvectors();
    } else {
        trials.middleCols(1, n).setIdentity();
    }
    std::mt19937_64 rng(0x5eed + static_cast<unsigned>(patch.owner));
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (int t = 0; t < kRandomTrials; ++t) {
        for (int i = 0; i < n; ++i) {
            trials(i, 1 + n + t) = uniform(rng);
        }
    }

    Eigen::Matrix<double, Eigen::Dynamic, 2> points(s + s * samples, 2);
    points.topRows(s) = patch.collocation;
    int row = s;
    for (int K : patch.members) {
        const auto c = mesh.corners(K);
        for (int i = 1; i <= samples; ++i) {
            points.row(row++) = triangle_sample(c, static_cast<unsigned>(i)).transpose();
        }
    }

    const Eigen::MatrixXd at_x = vx * trials;
    const Eigen::MatrixXd at_y = monomial_table(points, spec).values * trials;
    double best = 1.0;
    for (Eigen::Index t = 0; t < trials.cols(); ++t) {
        const double denom = at_x.col(t).cwiseAbs().maxCoeff();
        if (denom > 1e-300) {
            best = std::max(best, at_y.col(t).cwiseAbs().maxCoeff() / denom);
        }
    }
    return {best, 1.0 + best * std::sqrt(static_cast<double>(s))};
}

ReconstructionOperator build_reconstruction_operator(const TriMesh& mesh, int m,
                                                     const ReconstructionOptions& options)
{
    const int target = options.patch_size > 0 ? options.patch_size : patch_size_table(m);
    ReconstructionOperator op;
    op.degree = m;
    op.patches.reserve(mesh.num_elements());
    op.local.reserve(mesh.num_elements());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        op.patches.push_back(build_patch(mesh, K, target));
        op.local.push_back(fit_constrained_ls(op.patches.back(), m));
    }
    if (options.estimate_lambda) {
        op.lambda.resize(mesh.num_elements());
        for (int K = 0; K < mesh.num_elements(); ++K) {
            const LambdaEstimate est = estimate_lambda(mesh, op.patches[K], m, options.lambda_samples);
            op.lambda[K] = est.lambda;
            op.lambda_m = std::max(op.lambda_m, est.companion);
        }
    }
    return op;
}

} // namespace rda
