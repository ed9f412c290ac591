#include "rda/polybasis.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "rda/error.hpp"

namespace rda {

std::pair<int, int> monomial_exponents(int index)
{
    int d = 0;
    while (dim_pm(d) <= index) {
        ++d;
    }
    const int j = index - (d == 0 ? 0 : dim_pm(d - 1));
    return {d - j, j};
}

MonomialValues eval_scaled_monomials(const Point2& x, const PolySpec& spec)
{
    const Eigen::Matrix<double, 1, 2> p = x.transpose();
    MonomialTable t = monomial_table(p, spec);
    MonomialValues out;
    out.values = t.values.row(0).transpose();
    out.gradients.resize(spec.dim(), 2);
    out.gradients.col(0) = t.dx.row(0).transpose();
    out.gradients.col(1) = t.dy.row(0).transpose();
    return out;
}

MonomialTable monomial_table(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const PolySpec& spec)
{
    const int m = spec.degree;
    const Eigen::Index nq = points.rows();
    const double inv = 1.0 / spec.scale;

    // Powers xi^p and eta^p for p = 0..m, one column per power.
    Eigen::MatrixXd px(nq, m + 1);
    Eigen::MatrixXd py(nq, m + 1);
    px.col(0).setOnes();
    py.col(0).setOnes();
    const Eigen::VectorXd xi = (points.col(0).array() - spec.center.x()) * inv;
    const Eigen::VectorXd eta = (points.col(1).array() - spec.center.y()) * inv;
    for (int p = 1; p <= m; ++p) {
        px.col(p) = px.col(p - 1).cwiseProduct(xi);
        py.col(p) = py.col(p - 1).cwiseProduct(eta);
    }

    MonomialTable t;
    const int n = spec.dim();
    t.values.resize(nq, n);
    t.dx.resize(nq, n);
    t.dy.resize(nq, n);
    int col = 0;
    for (int d = 0; d <= m; ++d) {
        for (int j = 0; j <= d; ++j, ++col) {
            const int i = d - j;
            t.values.col(col) = px.col(i).cwiseProduct(py.col(j));
            if (i > 0) {
                t.dx.col(col) = (i * inv) * px.col(i - 1).cwiseProduct(py.col(j));
            } else {
                t.dx.col(col).setZero();
            }
            if (j > 0) {
                t.dy.col(col) = (j * inv) * px.col(i).cwiseProduct(py.col(j - 1));
            } else {
                t.dy.col(col).setZero();
            }
        }
    }
    return t;
}

namespace {

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
}

void check_exactness(int exactness)
{
    if (exactness < 0 || exactness > kMaxQuadratureExactness) {
        throw UnsupportedError("quadrature exactness " + std::to_string(exactness)
                               + " outside supported range 0.."
                               + std::to_string(kMaxQuadratureExactness));
    }
}

} // namespace

SegmentRule segment_quadrature(int exactness)
{
    check_exactness(exactness);
    const int n = std::max(1, (exactness + 2) / 2);
    std::vector<double> x;
    std::vector<double> w;
    gauss_legendre(n, x, w);
    SegmentRule rule;
    rule.points.resize(n, 1);
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        rule.points(i, 0) = 0.5 * (x[i] + 1.0);
        rule.weights(i) = 0.5 * w[i];
    }
    rule.exactness = 2 * n - 1;
    return rule;
}

TriangleRule triangle_quadrature(int exactness)
{
    check_exactness(exactness);
    TriangleRule rule;
    if (exactness <= 1) {
        rule.points.resize(1, 2);
        rule.points << 1.0 / 3.0, 1.0 / 3.0;
        rule.weights = Eigen::VectorXd::Constant(1, 0.5);
        rule.exactness = 1;
        return rule;
    }
    if (exactness == 2) {
        rule.points.resize(3, 2);
        rule.points << 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0;
        rule.weights = Eigen::VectorXd::Constant(3, 1.0 / 6.0);
        rule.exactness = 2;
        return rule;
    }

    // Collapsed (Stroud conical) product rule: x = u, y = v (1 - u) with
    // Jacobian (1 - u), which raises the degree in u by one.
    std::vector<double> xu;
    std::vector<double> wu;
    std::vector<double> xv;
    std::vector<double> wv;
    const int nu = (exactness + 3) / 2;
    const int nv = (exactness + 2) / 2;
    gauss_legendre(nu, xu, wu);
    gauss_legendre(nv, xv, wv);
    rule.points.resize(nu * nv, 2);
    rule.weights.resize(nu * nv);
    int q = 0;
    for (int a = 0; a < nu; ++a) {
        const double u = 0.5 * (xu[a] + 1.0);
        for (int b = 0; b < nv; ++b, ++q) {
            const double v = 0.5 * (xv[b] + 1.0);
            rule.points(q, 0) = u;
            rule.points(q, 1) = v * (1.0 - u);
            rule.weights(q) = 0.25 * wu[a] * wv[b] * (1.0 - u);
        }
    }
    rule.exactness = std::min(2 * nu - 2, 2 * nv - 1);
    return rule;
}

MappedRule map_to_triangle(const TriangleRule& rule, const std::array<Point2, 3>& c)
{
    const Point2 e1 = c[1] - c[0];
    const Point2 e2 = c[2] - c[0];
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    MappedRule out;
    out.points.resize(rule.size(), 2);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        out.points.row(q) = (c[0] + rule.points(q, 0) * e1 + rule.points(q, 1) * e2).transpose();
    }
    out.weights = rule.weights * jac;
    return out;
}

MappedRule map_to_segment(const SegmentRule& rule, const Point2& a, const Point2& b)
{
    MappedRule out;
    out.points.resize(rule.size(), 2);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        out.points.row(q) = (a + rule.points(q, 0) * (b - a)).transpose();
    }
    out.weights = rule.weights * (b - a).norm();
    return out;
}

} // namespace rda
