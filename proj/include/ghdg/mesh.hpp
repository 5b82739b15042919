#pragma once
// Conforming triangle meshes with facet topology.

#include <Eigen/Core>
#include <Eigen/LU>
#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ghdg {

using Point2 = Eigen::Vector2d;

struct Element {
  std::array<int, 3> vertices{};   // counterclockwise
  double signed_area = 0.0;
  double h = 0.0;                  // diameter
  std::array<int, 3> facets{};     // local facet j is opposite vertex j
  std::array<int, 3> orientation{};  // +1 if the local edge runs from lower to higher global vertex id
};

struct Facet {
  std::array<int, 2> vertices{};   // sorted ascending
  std::array<int, 2> elements{-1, -1};  // side 0 has the lower element index
  std::array<int, 2> local_index{-1, -1};
  double h = 0.0;
  bool boundary = false;
  std::array<Point2, 2> normals{Point2::Zero(), Point2::Zero()};  // outward per side
  Point2 tangent = Point2::Zero();  // unit, from vertices[0] to vertices[1]

  int side_of(int element) const { return elements[0] == element ? 0 : 1; }
};

struct Mesh {
  std::vector<Point2> vertices;
  std::vector<Element> elements;
  std::vector<Facet> facets;
  std::vector<int> parent;  // parent element in the coarser mesh, empty for roots
  double h_max = 0.0;

  int num_elements() const { return static_cast<int>(elements.size()); }
  int num_facets() const { return static_cast<int>(facets.size()); }
  int num_vertices() const { return static_cast<int>(vertices.size()); }

  Point2 vertex(int e, int j) const { return vertices[elements[e].vertices[j]]; }
  Point2 centroid(int e) const;
  // Barycentric coordinates of x with respect to element e.
  Eigen::Vector3d barycentric(int e, const Point2& x) const;
};

// Builds elements, facets, normals and diameters from vertex/triangle arrays.
// Triangles with clockwise order are rejected.
Mesh build_mesh(std::vector<Point2> vertices, const std::vector<std::array<int, 3>>& triangles);

Mesh generate_square(int n);

// Optional map applied to boundary vertices after projection to the circle;
// `grading` > 1 pulls interior vertices toward r = 1 via r -> 1 - (1 - r)^grading.
Mesh generate_polygonal_disk(int levels, std::optional<double> grading = std::nullopt);

using BoundaryProjection = std::function<Point2(const Point2&)>;
Mesh uniform_refine(const Mesh& m, const BoundaryProjection& project = {});

struct MeshStats {
  int n_elem = 0;
  int n_facet = 0;
  int n_boundary_facet = 0;
  double h_max = 0.0;
};
MeshStats mesh_stats(const Mesh& m);

void write_mesh(std::ostream& os, const Mesh& m);
Mesh read_mesh(std::istream& is);
void write_mesh_file(const std::string& path, const Mesh& m);
Mesh read_mesh_file(const std::string& path);

// FNV-1a over the vertex coordinates and connectivity.
std::uint64_t mesh_hash(const Mesh& m);

}  // namespace ghdg
