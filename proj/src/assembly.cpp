#include "rda/assembly.hpp"

#include <algorithm>
#include <cmath>

namespace rda {

namespace {

constexpr Complex kI(0.0, 1.0);

// Row-compressed matrix whose sparsity pattern is the union of dense blocks
// (one block per element or face). Values are accumulated in place, so the
// result does not depend on the order of insertion into the pattern.
class BlockAssembler {
public:
    BlockAssembler(int n, const std::vector<std::vector<int>>& blocks)
        : n_(n)
    {
        std::vector<std::vector<int>> by_row(n);
        for (int b = 0; b < static_cast<int>(blocks.size()); ++b) {
            for (int i : blocks[b]) {
                by_row[i].push_back(b);
            }
        }
        offsets_.assign(n + 1, 0);
        std::vector<int> marker(n, -1);
        std::vector<int> row;
        for (int i = 0; i < n; ++i) {
            row.clear();
            for (int b : by_row[i]) {
                for (int j : blocks[b]) {
                    if (marker[j] != i) {
                        marker[j] = i;
                        row.push_back(j);
                    }
                }
            }
            std::sort(row.begin(), row.end());
            columns_.insert(columns_.end(), row.begin(), row.end());
            offsets_[i + 1] = static_cast<int>(columns_.size());
        }
        values_.assign(columns_.size(), Complex(0.0));
    }

    void add(const std::vector<int>& dofs, const Eigen::MatrixXcd& local)
    {
        for (std::size_t a = 0; a < dofs.size(); ++a) {
            const int i = dofs[a];
            const auto begin = columns_.begin() + offsets_[i];
            const auto end = columns_.begin() + offsets_[i + 1];
            for (std::size_t b = 0; b < dofs.size(); ++b) {
                const auto it = std::lower_bound(begin, end, dofs[b]);
                values_[it - columns_.begin()] += local(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            }
        }
    }

    SparseComplexMatrix finish()
    {
        const Eigen::Map<const SparseComplexMatrix> view(n_, n_, static_cast<int>(values_.size()),
                                                         offsets_.data(), columns_.data(), values_.data());
        SparseComplexMatrix out = view;
        out.prune([](Eigen::Index, Eigen::Index, const Complex& v) { return v != Complex(0.0); });
        out.makeCompressed();
        return out;
    }

private:
    int n_;
    std::vector<int> offsets_;
    std::vector<int> columns_;
    std::vector<Complex> values_;
};

// DOFs of two elements merged; `plus_index`/`minus_index` give each local
// DOF's position in the merged list.
struct FaceDofs {
    std::vector<int> dofs;
    std::vector<int> plus_index;
    std::vector<int> minus_index;
};

FaceDofs merge_dofs(const std::vector<int>& plus, const std::vector<int>& minus, std::vector<int>& marker)
{
    FaceDofs out;
    out.dofs = plus;
    out.plus_index.resize(plus.size());
    for (std::size_t a = 0; a < plus.size(); ++a) {
        out.plus_index[a] = static_cast<int>(a);
        marker[plus[a]] = static_cast<int>(a);
    }
    out.minus_index.resize(minus.size());
    for (std::size_t a = 0; a < minus.size(); ++a) {
        if (marker[minus[a]] < 0) {
            marker[minus[a]] = static_cast<int>(out.dofs.size());
            out.dofs.push_back(minus[a]);
        }
        out.minus_index[a] = marker[minus[a]];
    }
    for (int d : out.dofs) {
        marker[d] = -1;
    }
    return out;
}

Eigen::MatrixXd scatter_columns(const Eigen::MatrixXd& local, const std::vector<int>& index, int width)
{
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(local.rows(), width);
    for (std::size_t a = 0; a < index.size(); ++a) {
        out.col(index[a]) = local.col(static_cast<Eigen::Index>(a));
    }
    return out;
}

std::vector<std::vector<int>> coupling_blocks(const TriMesh& mesh, const DiscreteSpace& space,
                                              std::vector<FaceDofs>& face_dofs)
{
    std::vector<std::vector<int>> blocks;
    blocks.reserve(space.elements.size() + mesh.faces.size());
    for (const LocalBasis& b : space.elements) {
        blocks.push_back(b.dofs);
    }
    std::vector<int> marker(space.num_dofs, -1);
    face_dofs.resize(mesh.faces.size());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceRecord& face = mesh.faces[f];
        if (face.boundary) {
            continue;
        }
        face_dofs[f] = merge_dofs(space.elements[face.plus].dofs, space.elements[face.minus].dofs, marker);
        blocks.push_back(face_dofs[f].dofs);
    }
    return blocks;
}

Eigen::VectorXcd sample(const std::function<Complex(const Point2&)>& fn,
                        const Eigen::Matrix<double, Eigen::Dynamic, 2>& points)
{
    Eigen::VectorXcd v(points.rows());
    for (Eigen::Index q = 0; q < points.rows(); ++q) {
        v(q) = fn(points.row(q).transpose());
    }
    return v;
}

} // namespace

void HelmholtzConfig::validate() const
{
    if (!(k > 0.0)) {
        throw ConfigError("wavenumber k must be positive");
    }
    if (!(eps >= 0.0)) {
        throw ConfigError("absorption eps must be non-negative");
    }
    if (!(eta >= 0.0)) {
        throw ConfigError("penalty eta must be positive (or 0 for the default)");
    }
    if (degree < 0) {
        throw ConfigError("degree must be non-negative");
    }
}

ManufacturedSolution make_manufactured_solution(std::function<Complex(const Point2&)> u,
                                                std::function<Vector2c(const Point2&)> grad,
                                                std::function<Complex(const Point2&)> laplacian, double k,
                                                double eps)
{
    ManufacturedSolution sol;
    const Complex shift(k * k, -eps);
    sol.f = [u, laplacian, shift](const Point2& x) { return -laplacian(x) - shift * u(x); };
    sol.g = [u, grad, k](const Point2& x, const Point2& n) {
        const Vector2c gu = grad(x);
        return gu(0) * n.x() + gu(1) * n.y() + kI * k * u(x);
    };
    sol.u = std::move(u);
    sol.grad = std::move(grad);
    return sol;
}

ManufacturedSolution plane_wave_solution(double k, double eps, double angle)
{
    const double dx = std::cos(angle);
    const double dy = std::sin(angle);
    auto u = [k, dx, dy](const Point2& x) { return std::exp(kI * k * (x.x() * dx + x.y() * dy)); };
    auto grad = [u, k, dx, dy](const Point2& x) {
        const Complex v = kI * k * u(x);
        return Vector2c(v * dx, v * dy);
    };
    auto lap = [u, k](const Point2& x) { return -k * k * u(x); };
    return make_manufactured_solution(u, grad, lap, k, eps);
}

ManufacturedSolution bessel_solution(double k, double eps)
{
    const Complex c = Complex(std::cos(k), std::sin(k))
                      / (k * Complex(std::cyl_bessel_j(0.0, k), std::cyl_bessel_j(1.0, k)));
    const Point2 center(0.5, 0.5);
    auto u = [k, c, center](const Point2& x) {
        const double r = (x - center).norm();
        return Complex(std::cos(k * r) / k) - c * std::cyl_bessel_j(0.0, k * r);
    };
    auto grad = [k, c, center](const Point2& x) {
        const Point2 d = x - center;
        const double r = d.norm();
        if (r < 1e-300) {
            return Vector2c(0.0, 0.0);
        }
        const Complex dr = -std::sin(k * r) + c * k * std::cyl_bessel_j(1.0, k * r);
        return Vector2c(dr * d.x() / r, dr * d.y() / r);
    };
    auto lap = [k, c, center](const Point2& x) {
        const double r = (x - center).norm();
        const double sinc = r < 1e-300 ? k : std::sin(k * r) / r;
        return Complex(-k * std::cos(k * r) - sinc) + c * k * k * std::cyl_bessel_j(0.0, k * r);
    };
    return make_manufactured_solution(u, grad, lap, k, eps);
}

ManufacturedSolution polynomial_solution(const Eigen::VectorXcd& coefficients, double k, double eps)
{
    const int n = static_cast<int>(coefficients.size());
    auto term = [](double base, int p) { return p <= 0 ? 1.0 : std::pow(base, p); };
    auto u = [coefficients, n, term](const Point2& x) {
        Complex v = 0.0;
        for (int a = 0; a < n; ++a) {
            const auto [i, j] = monomial_exponents(a);
            v += coefficients(a) * term(x.x(), i) * term(x.y(), j);
        }
        return v;
    };
    auto grad = [coefficients, n, term](const Point2& x) {
        Vector2c g(0.0, 0.0);
        for (int a = 0; a < n; ++a) {
            const auto [i, j] = monomial_exponents(a);
            if (i > 0) {
                g(0) += coefficients(a) * (i * term(x.x(), i - 1) * term(x.y(), j));
            }
            if (j > 0) {
                g(1) += coefficients(a) * (j * term(x.x(), i) * term(x.y(), j - 1));
            }
        }
        return g;
    };
    auto lap = [coefficients, n, term](const Point2& x) {
        Complex v = 0.0;
        for (int a = 0; a < n; ++a) {
            const auto [i, j] = monomial_exponents(a);
            if (i > 1) {
                v += coefficients(a) * (i * (i - 1) * term(x.x(), i - 2) * term(x.y(), j));
            }
            if (j > 1) {
                v += coefficients(a) * (j * (j - 1) * term(x.x(), i) * term(x.y(), j - 2));
            }
        }
        return v;
    };
    return make_manufactured_solution(u, grad, lap, k, eps);
}

ManufacturedSolution zero_solution()
{
    ManufacturedSolution sol;
    sol.u = [](const Point2&) { return Complex(0.0); };
    sol.grad = [](const Point2&) { return Vector2c(0.0, 0.0); };
    sol.f = [](const Point2&) { return Complex(0.0); };
    sol.g = [](const Point2&, const Point2&) { return Complex(0.0); };
    return sol;
}

GlobalSystem assemble_system(const TriMesh& mesh, const DiscreteSpace& space, const HelmholtzConfig& cfg,
                             const ManufacturedSolution& sol)
{
    cfg.validate();
    if (static_cast<int>(space.elements.size()) != mesh.num_elements()) {
        throw ConfigError("discrete space does not match the mesh");
    }
    const TriangleRule tri = triangle_quadrature(cfg.quadrature_order());
    const SegmentRule seg = segment_quadrature(cfg.quadrature_order());
    const Complex shift(cfg.k * cfg.k, -cfg.eps);
    const double eta = cfg.penalty();

    std::vector<FaceDofs> face_dofs;
    BlockAssembler assembler(space.num_dofs, coupling_blocks(mesh, space, face_dofs));
    GlobalSystem sys;
    sys.rhs = Eigen::VectorXcd::Zero(space.num_dofs);

    for (int K = 0; K < mesh.num_elements(); ++K) {
        const LocalBasis& basis = space.elements[K];
        const MappedRule q = map_to_triangle(tri, mesh.corners(K));
        const BasisTable t = basis_table(basis, q.points);
        const auto w = q.weights.asDiagonal();
        const Eigen::MatrixXd stiffness = t.dx.transpose() * w * t.dx + t.dy.transpose() * w * t.dy;
        const Eigen::MatrixXd mass = t.values.transpose() * w * t.values;
        assembler.add(basis.dofs, stiffness.cast<Complex>() - shift * mass.cast<Complex>());

        const Eigen::VectorXcd fw = q.weights.cast<Complex>().cwiseProduct(sample(sol.f, q.points));
        const Eigen::VectorXcd local = t.values.transpose().cast<Complex>() * fw;
        for (std::size_t a = 0; a < basis.dofs.size(); ++a) {
            sys.rhs(basis.dofs[a]) += local(static_cast<Eigen::Index>(a));
        }
    }

    for (int f = 0; f < mesh.num_faces(); ++f) {
        const FaceRecord& face = mesh.faces[f];
        const MappedRule q = map_to_segment(seg, mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]]);
        const auto w = q.weights.asDiagonal();
        const Point2& n = face.normal;

        if (face.boundary) {
            const LocalBasis& basis = space.elements[face.plus];
            const BasisTable t = basis_table(basis, q.points);
            const Eigen::MatrixXd mass = t.values.transpose() * w * t.values;
            assembler.add(basis.dofs, (kI * cfg.k) * mass.cast<Complex>());

            Eigen::VectorXcd gw(q.points.rows());
            for (Eigen::Index i = 0; i < q.points.rows(); ++i) {
                gw(i) = q.weights(i) * sol.g(q.points.row(i).transpose(), n);
            }
            const Eigen::VectorXcd local = t.values.transpose().cast<Complex>() * gw;
            for (std::size_t a = 0; a < basis.dofs.size(); ++a) {
                sys.rhs(basis.dofs[a]) += local(static_cast<Eigen::Index>(a));
            }
            continue;
        }

        const FaceDofs& fd = face_dofs[f];
        const int width = static_cast<int>(fd.dofs.size());
        const BasisTable tp = basis_table(space.elements[face.plus], q.points);
        const BasisTable tm = basis_table(space.elements[face.minus], q.points);
        const Eigen::MatrixXd jump
            = scatter_columns(tp.values, fd.plus_index, width) - scatter_columns(tm.values, fd.minus_index, width);
        const Eigen::MatrixXd avg_dn
            = 0.5 * (scatter_columns(tp.dx * n.x() + tp.dy * n.y(), fd.plus_index, width)
                     + scatter_columns(tm.dx * n.x() + tm.dy * n.y(), fd.minus_index, width));
        const Eigen::MatrixXd consistency = jump.transpose() * w * avg_dn;
        const Eigen::MatrixXd penalty = jump.transpose() * w * jump;
        const Complex mu = (eta / face.length) * (cfg.imaginary_penalty ? kI : Complex(1.0));
        assembler.add(fd.dofs, -(consistency + consistency.transpose()).cast<Complex>() + mu * penalty.cast<Complex>());
    }

    sys.matrix = assembler.finish();
    return sys;
}

GlobalSystem assemble_rda_system(const TriMesh& mesh, const ReconstructionOperator& recon,
                                 const HelmholtzConfig& cfg, const ManufacturedSolution& sol)
{
    if (recon.num_elements() != mesh.num_elements()) {
        throw ConfigError("reconstruction operator was built on a different mesh");
    }
    if (recon.degree != cfg.degree) {
        throw ConfigError("reconstruction degree " + std::to_string(recon.degree)
                          + " differs from configured degree " + std::to_string(cfg.degree));
    }
    return assemble_system(mesh, reconstructed_space(recon), cfg, sol);
}

GlobalSystem assemble_dg_system(const TriMesh& mesh, int m, const HelmholtzConfig& cfg,
                                const ManufacturedSolution& sol)
{
    if (m != cfg.degree) {
        throw ConfigError("DG degree differs from configured degree");
    }
    return assemble_system(mesh, discontinuous_space(mesh, m), cfg, sol);
}

SparseRealMatrix assemble_p0_preconditioner(const TriMesh& mesh, const HelmholtzConfig& cfg)
{
    cfg.validate();
    const double k = cfg.k;
    const double coupling = cfg.penalty() / mesh.h();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.elements.size() + 4 * mesh.faces.size());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        triplets.emplace_back(K, K, k * k * mesh.area[K]);
    }
    for (const FaceRecord& face : mesh.faces) {
        if (face.boundary) {
            triplets.emplace_back(face.plus, face.plus, k * face.length);
            continue;
        }
        const double w = coupling * face.length;
        triplets.emplace_back(face.plus, face.plus, w);
        triplets.emplace_back(face.minus, face.minus, w);
        triplets.emplace_back(face.plus, face.minus, -w);
        triplets.emplace_back(face.minus, face.plus, -w);
    }
    SparseRealMatrix p(mesh.num_elements(), mesh.num_elements());
    p.setFromTriplets(triplets.begin(), triplets.end());
    p.makeCompressed();
    return p;
}

namespace {

struct TraceValues {
    Eigen::VectorXcd value;
    Eigen::VectorXcd dx;
    Eigen::VectorXcd dy;
};

TraceValues discrete_values(const LocalBasis& basis, const Eigen::VectorXcd& uh,
                            const Eigen::Matrix<double, Eigen::Dynamic, 2>& points)
{
    Eigen::VectorXcd local(static_cast<Eigen::Index>(basis.dofs.size()));
    for (std::size_t a = 0; a < basis.dofs.size(); ++a) {
        local(static_cast<Eigen::Index>(a)) = uh(basis.dofs[a]);
    }
    const BasisTable t = basis_table(basis, points);
    return {t.values.cast<Complex>() * local, t.dx.cast<Complex>() * local, t.dy.cast<Complex>() * local};
}

// Error u - u_h at the points, with u = 0 when no solution is given.
TraceValues error_values(const LocalBasis& basis, const Eigen::VectorXcd& uh,
                         const Eigen::Matrix<double, Eigen::Dynamic, 2>& points, const ManufacturedSolution* sol)
{
    TraceValues e = discrete_values(basis, uh, points);
    e.value = -e.value;
    e.dx = -e.dx;
    e.dy = -e.dy;
    if (sol != nullptr) {
        for (Eigen::Index q = 0; q < points.rows(); ++q) {
            const Point2 x = points.row(q).transpose();
            const Vector2c g = sol->grad(x);
            e.value(q) += sol->u(x);
            e.dx(q) += g(0);
            e.dy(q) += g(1);
        }
    }
    return e;
}

} // namespace

ErrorReport compute_error_norms(const TriMesh& mesh, const DiscreteSpace& space, const Eigen::VectorXcd& uh,
                                const ManufacturedSolution* sol, const HelmholtzConfig& cfg)
{
    if (uh.size() != space.num_dofs) {
        throw DimensionError("compute_error_norms: coefficient vector does not match the space");
    }
    const TriangleRule tri = triangle_quadrature(cfg.quadrature_order());
    const SegmentRule seg = segment_quadrature(cfg.quadrature_order());
    const double h = mesh.h();

    ErrorReport r;
    double l2 = 0.0;
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const MappedRule q = map_to_triangle(tri, mesh.corners(K));
        const TraceValues e = error_values(space.elements[K], uh, q.points, sol);
        l2 += q.weights.dot(e.value.cwiseAbs2());
        r.volume_gradient += q.weights.dot(e.dx.cwiseAbs2() + e.dy.cwiseAbs2());
    }
    for (const FaceRecord& face : mesh.faces) {
        const MappedRule q = map_to_segment(seg, mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]]);
        const TraceValues ep = error_values(space.elements[face.plus], uh, q.points, sol);
        if (face.boundary) {
            r.boundary += cfg.k * q.weights.dot(ep.value.cwiseAbs2());
            continue;
        }
        const TraceValues em = error_values(space.elements[face.minus], uh, q.points, sol);
        r.interior_jump += q.weights.dot((ep.value - em.value).cwiseAbs2()) / face.length;
        r.face_average
            += h * q.weights.dot((0.5 * (ep.dx + em.dx)).cwiseAbs2() + (0.5 * (ep.dy + em.dy)).cwiseAbs2());
    }
    r.l2 = std::sqrt(l2);
    r.dg = std::sqrt(r.volume_gradient + r.interior_jump + r.boundary);
    r.energy = std::sqrt(r.dg * r.dg + r.face_average);
    return r;
}

Eigen::VectorXcd exact_form_against_basis(const TriMesh& mesh, const DiscreteSpace& space,
                                          const HelmholtzConfig& cfg, const ManufacturedSolution& sol)
{
    const TriangleRule tri = triangle_quadrature(cfg.quadrature_order());
    const SegmentRule seg = segment_quadrature(cfg.quadrature_order());
    const Complex shift(cfg.k * cfg.k, -cfg.eps);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(space.num_dofs);

    const auto scatter = [&out](const LocalBasis& basis, const Eigen::VectorXcd& local) {
        for (std::size_t a = 0; a < basis.dofs.size(); ++a) {
            out(basis.dofs[a]) += local(static_cast<Eigen::Index>(a));
        }
    };

    for (int K = 0; K < mesh.num_elements(); ++K) {
        const LocalBasis& basis = space.elements[K];
        const MappedRule q = map_to_triangle(tri, mesh.corners(K));
        const BasisTable t = basis_table(basis, q.points);
        Eigen::VectorXcd ux(q.points.rows());
        Eigen::VectorXcd uy(q.points.rows());
        Eigen::VectorXcd uu(q.points.rows());
        for (Eigen::Index i = 0; i < q.points.rows(); ++i) {
            const Point2 x = q.points.row(i).transpose();
            const Vector2c g = sol.grad(x);
            ux(i) = q.weights(i) * g(0);
            uy(i) = q.weights(i) * g(1);
            uu(i) = q.weights(i) * sol.u(x);
        }
        scatter(basis, t.dx.transpose().cast<Complex>() * ux + t.dy.transpose().cast<Complex>() * uy
                           - shift * (t.values.transpose().cast<Complex>() * uu));
    }

    for (const FaceRecord& face : mesh.faces) {
        const MappedRule q = map_to_segment(seg, mesh.vertices[face.vertices[0]], mesh.vertices[face.vertices[1]]);
        Eigen::VectorXcd dn(q.points.rows());
        Eigen::VectorXcd uu(q.points.rows());
        for (Eigen::Index i = 0; i < q.points.rows(); ++i) {
            const Point2 x = q.points.row(i).transpose();
            const Vector2c g = sol.grad(x);
            dn(i) = q.weights(i) * (g(0) * face.normal.x() + g(1) * face.normal.y());
            uu(i) = q.weights(i) * sol.u(x);
        }
        const LocalBasis& plus = space.elements[face.plus];
        const BasisTable tp = basis_table(plus, q.points);
        if (face.boundary) {
            scatter(plus, (kI * cfg.k) * (tp.values.transpose().cast<Complex>() * uu));
            continue;
        }
        const LocalBasis& minus = space.elements[face.minus];
        const BasisTable tm = basis_table(minus, q.points);
        scatter(plus, -(tp.values.transpose().cast<Complex>() * dn));
        scatter(minus, tm.values.transpose().cast<Complex>() * dn);
    }
    return out;
}

} // namespace rda
