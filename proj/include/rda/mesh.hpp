#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace rda {

using Point2 = Eigen::Vector2d;

/// An edge of the triangulation. On interior faces the normal points from
/// `plus` into `minus`; on boundary faces it is the outward normal of `plus`.
struct FaceRecord {
    std::array<int, 2> vertices{};
    double length = 0.0;
    Point2 normal = Point2::Zero();
    int plus = -1;
    int minus = -1;
    bool boundary = false;
};

/// Conforming triangulation with face topology and per-element geometry.
///
/// Instances are produced by make_mesh(), uniform_square_mesh() and
/// refine_red(); all derived data is filled and the object is treated as
/// immutable afterwards.
struct TriMesh {
    std::vector<Point2> vertices;
    std::vector<std::array<int, 3>> elements;
    std::vector<FaceRecord> faces;

    // Per-element geometry.
    std::vector<double> diameter;
    std::vector<double> area;
    std::vector<Point2> barycenter;
    /// Faces of element K, edge (v_i, v_{i+1}) in slot i.
    std::vector<std::array<int, 3>> element_faces;

    int level = 0;
    /// Parent element on the next coarser level; empty at level 0.
    std::vector<int> parent;

    int num_elements() const { return static_cast<int>(elements.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_faces() const { return static_cast<int>(faces.size()); }
    int num_boundary_faces() const;

    /// Global mesh size h = max_K diam(K).
    double h() const;
    /// max_K h_K / min_K rho_K with rho_K the inscribed-circle diameter.
    double quasi_uniformity() const;
    /// Face-neighbours of element K (at most three).
    std::vector<int> neighbors(int element) const;
    /// Physical coordinates of the three corners of element K.
    std::array<Point2, 3> corners(int element) const;
};

/// Builds a mesh from raw arrays; validates orientation and fills topology.
TriMesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> elements);

/// n x n squares on (0,1)^2, each cut by the (0,0)-(1,1) diagonal.
TriMesh uniform_square_mesh(int n);

/// Splits every triangle into four congruent children via edge midpoints.
/// Child c of element K is element 4K + c.
TriMesh refine_red(const TriMesh& mesh);

/// Recomputes geometry and faces. Faces are sorted by (min, max) endpoint
/// index; the lower adjacent element index is the "+" side.
TriMesh build_face_topology(TriMesh mesh);

/// Nested hierarchy ending at uniform resolution n. The coarsest level is
/// obtained by halving n while it stays even and the half is at least
/// `min_coarse` (so 40 -> 10, 20, 40). Returned coarse to fine.
std::vector<TriMesh> nested_square_meshes(int n, int min_coarse = 10);

bool point_in_triangle(const Point2& p, const std::array<Point2, 3>& tri, double tol = 1e-12);

/// Plain-text dump: "ndim 2", then "v x y" and "t i j k" lines.
void write_mesh(std::ostream& out, const TriMesh& mesh);
void write_mesh(const std::string& path, const TriMesh& mesh);

} // namespace rda
