#pragma once

#include <Eigen/Core>

#include "rda/mesh.hpp"

namespace rda {

/// Number of bivariate monomials of total degree <= m.
constexpr int dim_pm(int m) { return (m + 1) * (m + 2) / 2; }

/// Scaled monomials ((x - center) / scale)^alpha, |alpha| <= degree, in
/// graded-lexicographic order: 1, x, y, x^2, xy, y^2, x^3, ...
struct PolySpec {
    int degree = 1;
    Point2 center = Point2::Zero();
    double scale = 1.0;

    int dim() const { return dim_pm(degree); }
};

struct MonomialValues {
    Eigen::VectorXd values;
    /// Row i holds the physical gradient of monomial i.
    Eigen::Matrix<double, Eigen::Dynamic, 2> gradients;
};

MonomialValues eval_scaled_monomials(const Point2& x, const PolySpec& spec);

/// Monomials evaluated at many points at once. Row q of each matrix belongs
/// to points.row(q); columns follow the graded-lex order.
struct MonomialTable {
    Eigen::MatrixXd values;
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
};

MonomialTable monomial_table(const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const PolySpec& spec);

/// Exponents (i, j) of monomial number `index` (x^i y^j).
std::pair<int, int> monomial_exponents(int index);

/// Quadrature on a reference cell: the triangle {(0,0),(1,0),(0,1)} for
/// Dim = 2 and the interval [0,1] for Dim = 1.
template <int Dim>
struct QuadratureRule {
    Eigen::Matrix<double, Eigen::Dynamic, Dim> points;
    Eigen::VectorXd weights;
    int exactness = 0;

    Eigen::Index size() const { return weights.size(); }
};

using TriangleRule = QuadratureRule<2>;
using SegmentRule = QuadratureRule<1>;

inline constexpr int kMaxQuadratureExactness = 40;

/// Gauss-Legendre nodes on [0,1], exact for polynomials of degree `exactness`.
SegmentRule segment_quadrature(int exactness);

/// Triangle rule exact for polynomials of degree `exactness`; positive
/// weights summing to 1/2, all points strictly inside the triangle.
TriangleRule triangle_quadrature(int exactness);

/// Physical points and weights of a reference triangle rule mapped onto the
/// triangle with the given corners.
struct MappedRule {
    Eigen::Matrix<double, Eigen::Dynamic, 2> points;
    Eigen::VectorXd weights;
};

MappedRule map_to_triangle(const TriangleRule& rule, const std::array<Point2, 3>& corners);
MappedRule map_to_segment(const SegmentRule& rule, const Point2& a, const Point2& b);

} // namespace rda
