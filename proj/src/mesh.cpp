#include "rda/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <utility>

#include "rda/error.hpp"

namespace rda {

namespace {

double signed_area(const Point2& a, const Point2& b, const Point2& c)
{
    return 0.5 * ((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
}

} // namespace

int TriMesh::num_boundary_faces() const
{
    return static_cast<int>(
        std::count_if(faces.begin(), faces.end(), [](const FaceRecord& f) { return f.boundary; }));
}

double TriMesh::h() const
{
    return diameter.empty() ? 0.0 : *std::max_element(diameter.begin(), diameter.end());
}

double TriMesh::quasi_uniformity() const
{
    double min_rho = std::numeric_limits<double>::infinity();
    for (int K = 0; K < num_elements(); ++K) {
        const auto c = corners(K);
        const double perimeter = (c[1] - c[0]).norm() + (c[2] - c[1]).norm() + (c[0] - c[2]).norm();
        min_rho = std::min(min_rho, 4.0 * area[K] / perimeter);
    }
    return h() / min_rho;
}

std::vector<int> TriMesh::neighbors(int element) const
{
    std::vector<int> out;
    for (int f : element_faces[element]) {
        const FaceRecord& face = faces[f];
        if (face.boundary) {
            continue;
        }
        out.push_back(face.plus == element ? face.minus : face.plus);
    }
    return out;
}

std::array<Point2, 3> TriMesh::corners(int element) const
{
    const auto& t = elements[element];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
}

TriMesh build_face_topology(TriMesh mesh)
{
    const int ne = mesh.num_elements();
    mesh.diameter.assign(ne, 0.0);
    mesh.area.assign(ne, 0.0);
    mesh.barycenter.assign(ne, Point2::Zero());

    for (int K = 0; K < ne; ++K) {
        for (int v : mesh.elements[K]) {
            if (v < 0 || v >= mesh.num_vertices()) {
                throw TopologyError("element " + std::to_string(K) + " references missing vertex");
            }
        }
        const auto c = mesh.corners(K);
        const double a = signed_area(c[0], c[1], c[2]);
        if (!(a > 0.0)) {
            throw TopologyError("element " + std::to_string(K)
                                + " is degenerate or not counterclockwise");
        }
        mesh.area[K] = a;
        mesh.barycenter[K] = (c[0] + c[1] + c[2]) / 3.0;
        mesh.diameter[K] = std::max({(c[1] - c[0]).norm(), (c[2] - c[1]).norm(), (c[0] - c[2]).norm()});
    }

    // (min, max) vertex pair -> incident (element, local edge) list.
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edges;
    for (int K = 0; K < ne; ++K) {
        const auto& t = mesh.elements[K];
        for (int i = 0; i < 3; ++i) {
            const int a = t[i];
            const int b = t[(i + 1) % 3];
            edges[{std::min(a, b), std::max(a, b)}].emplace_back(K, i);
        }
    }

    mesh.faces.clear();
    mesh.faces.reserve(edges.size());
    mesh.element_faces.assign(ne, {-1, -1, -1});
    for (const auto& [key, incident] : edges) {
        if (incident.size() > 2) {
            throw TopologyError("edge (" + std::to_string(key.first) + ", " + std::to_string(key.second)
                                + ") is shared by more than two elements");
        }
        FaceRecord face;
        face.vertices = {key.first, key.second};
        const Point2& a = mesh.vertices[key.first];
        const Point2& b = mesh.vertices[key.second];
        face.length = (b - a).norm();

        face.plus = incident[0].first;
        if (incident.size() == 2) {
            face.minus = incident[1].first;
            if (face.minus < face.plus) {
                std::swap(face.plus, face.minus);
            }
        }
        face.boundary = incident.size() == 1;

        Point2 n(b.y() - a.y(), a.x() - b.x());
        n /= n.norm();
        if (n.dot(0.5 * (a + b) - mesh.barycenter[face.plus]) < 0.0) {
            n = -n;
        }
        face.normal = n;

        const int id = static_cast<int>(mesh.faces.size());
        for (const auto& [K, local] : incident) {
            mesh.element_faces[K][local] = id;
        }
        mesh.faces.push_back(face);
    }
    return mesh;
}

TriMesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> elements)
{
    TriMesh mesh;
    mesh.vertices = std::move(vertices);
    mesh.elements = std::move(elements);
    return build_face_topology(std::move(mesh));
}

TriMesh uniform_square_mesh(int n)
{
    if (n < 1) {
        throw TopologyError("uniform_square_mesh: n must be >= 1");
    }
    std::vector<Point2> vertices;
    vertices.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            vertices.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
        }
    }
    const auto vid = [n](int i, int j) { return j * (n + 1) + i; };

    std::vector<std::array<int, 3>> elements;
    elements.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const int v00 = vid(i, j);
            const int v10 = vid(i + 1, j);
            const int v11 = vid(i + 1, j + 1);
            const int v01 = vid(i, j + 1);
            elements.push_back({v00, v10, v11});
            elements.push_back({v00, v11, v01});
        }
    }
    return make_mesh(std::move(vertices), std::move(elements));
}

TriMesh refine_red(const TriMesh& mesh)
{
    TriMesh fine;
    fine.vertices = mesh.vertices;
    const int nv = mesh.num_vertices();
    for (const FaceRecord& f : mesh.faces) {
        fine.vertices.push_back(0.5 * (mesh.vertices[f.vertices[0]] + mesh.vertices[f.vertices[1]]));
    }

    fine.elements.reserve(4 * mesh.elements.size());
    fine.parent.reserve(4 * mesh.elements.size());
    for (int K = 0; K < mesh.num_elements(); ++K) {
        const auto& t = mesh.elements[K];
        const auto& ef = mesh.element_faces[K];
        const int m01 = nv + ef[0];
        const int m12 = nv + ef[1];
        const int m20 = nv + ef[2];
        fine.elements.push_back({t[0], m01, m20});
        fine.elements.push_back({m01, t[1], m12});
        fine.elements.push_back({m20, m12, t[2]});
        fine.elements.push_back({m01, m12, m20});
        for (int c = 0; c < 4; ++c) {
            fine.parent.push_back(K);
        }
    }
    fine.level = mesh.level + 1;
    return build_face_topology(std::move(fine));
}

std::vector<TriMesh> nested_square_meshes(int n, int min_coarse)
{
    int coarse = n;
    int levels = 1;
    while (coarse % 2 == 0 && coarse / 2 >= min_coarse) {
        coarse /= 2;
        ++levels;
    }
    std::vector<TriMesh> meshes;
    meshes.reserve(levels);
    meshes.push_back(uniform_square_mesh(coarse));
    for (int l = 1; l < levels; ++l) {
        meshes.push_back(refine_red(meshes.back()));
    }
    return meshes;
}

bool point_in_triangle(const Point2& p, const std::array<Point2, 3>& tri, double tol)
{
    const double total = signed_area(tri[0], tri[1], tri[2]);
    const double l0 = signed_area(p, tri[1], tri[2]) / total;
    const double l1 = signed_area(tri[0], p, tri[2]) / total;
    const double l2 = signed_area(tri[0], tri[1], p) / total;
    return l0 >= -tol && l1 >= -tol && l2 >= -tol;
}

void write_mesh(std::ostream& out, const TriMesh& mesh)
{
    char buf[96];
    out << "ndim 2\n";
    for (const Point2& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x(), v.y());
        out << buf;
    }
    for (const auto& t : mesh.elements) {
        out << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
}

void write_mesh(const std::string& path, const TriMesh& mesh)
{
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot open " + path + " for writing");
    }
    write_mesh(out, mesh);
}

} // namespace rda
