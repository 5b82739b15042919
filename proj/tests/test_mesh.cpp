#include "support.hpp"

#include <doctest.h>

#include <set>
#include <sstream>

using namespace ghdg;
using namespace ghdg::test;

namespace {

int interior_facets(const Mesh& m) {
  int n = 0;
  for (const Facet& f : m.facets) n += f.boundary ? 0 : 1;
  return n;
}

void check_invariants(const Mesh& m) {
  const MeshStats s = mesh_stats(m);
  CHECK(s.n_facet * 2 == 3 * s.n_elem + s.n_boundary_facet);
  CHECK(m.num_vertices() - m.num_facets() + m.num_elements() == 1);
  for (int e = 0; e < m.num_elements(); ++e) {
    const Element& el = m.elements[e];
    CHECK(el.signed_area > 0.0);
    double h = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) h = std::max(h, (m.vertex(e, i) - m.vertex(e, j)).norm());
    CHECK(el.h == doctest::Approx(h).epsilon(1e-14));
    for (int j = 0; j < 3; ++j) {
      const Facet& f = m.facets[el.facets[j]];
      const int side = f.side_of(e);
      CHECK(f.elements[side] == e);
      CHECK(f.local_index[side] == j);
      const Point2 nu = f.normals[side];
      CHECK(std::abs(nu.norm() - 1.0) < 1e-14);
      const Point2 mid = 0.5 * (m.vertices[f.vertices[0]] + m.vertices[f.vertices[1]]);
      CHECK(nu.dot(mid - m.centroid(e)) > 0.0);
    }
  }
  for (const Facet& f : m.facets) {
    CHECK(f.boundary == (f.elements[1] < 0));
    if (f.boundary) continue;
    CHECK(f.elements[0] < f.elements[1]);
    CHECK((f.normals[0] + f.normals[1]).norm() < 1e-14);
    const int o0 = m.elements[f.elements[0]].orientation[f.local_index[0]];
    const int o1 = m.elements[f.elements[1]].orientation[f.local_index[1]];
    CHECK(o0 == -o1);
  }
}

}  // namespace

TEST_CASE("generate_square counts") {
  const Mesh m1 = generate_square(1);
  CHECK(m1.num_vertices() == 4);
  CHECK(m1.num_elements() == 2);
  CHECK(m1.num_facets() == 5);
  const MeshStats s = mesh_stats(m1);
  CHECK(s.n_boundary_facet == 4);
  CHECK(s.h_max == doctest::Approx(std::sqrt(2.0)));

  const Mesh m2 = generate_square(2);
  CHECK(m2.num_vertices() == 9);
  CHECK(m2.num_elements() == 8);
  CHECK(m2.num_facets() == 16);
  CHECK(interior_facets(m2) == 8);
  CHECK(m2.h_max == doctest::Approx(std::sqrt(2.0) / 2));
  check_invariants(m2);
  CHECK_THROWS_AS(generate_square(0), std::invalid_argument);
}

TEST_CASE("polygonal disk") {
  const Mesh d0 = generate_polygonal_disk(0);
  CHECK(d0.num_elements() == 6);
  CHECK(d0.num_vertices() == 7);
  CHECK(d0.num_facets() == 12);
  CHECK(mesh_stats(d0).n_boundary_facet == 6);
  CHECK(mesh_stats(d0).h_max == doctest::Approx(1.0));
  const Mesh d1 = generate_polygonal_disk(1);
  CHECK(d1.num_elements() == 24);
  for (const Facet& f : d1.facets)
    if (f.boundary)
      for (int v : f.vertices) CHECK(std::abs(d1.vertices[v].squaredNorm() - 1.0) < 1e-14);
  check_invariants(d1);
  const Mesh g = generate_polygonal_disk(3, 2.0);
  check_invariants(g);
  // Grading makes the boundary layer finer than the core.
  double h_in = 0.0, h_out = 1e9;
  for (int e = 0; e < g.num_elements(); ++e) {
    const double r = g.centroid(e).norm();
    if (r < 0.3) h_in = std::max(h_in, g.elements[e].h);
    if (r > 0.9) h_out = std::min(h_out, g.elements[e].h);
  }
  CHECK(h_out < h_in);
}

TEST_CASE("uniform refinement") {
  const Mesh m = generate_square(1);
  const Mesh r = uniform_refine(m);
  CHECK(r.num_elements() == 8);
  CHECK(r.h_max == doctest::Approx(m.h_max / 2).epsilon(1e-14));
  check_invariants(r);
  const Mesh r2 = uniform_refine(generate_square(3));
  check_invariants(r2);
  CHECK(r2.h_max == doctest::Approx(generate_square(3).h_max / 2).epsilon(1e-14));
  // Nesting: every child lies in its parent.
  const Mesh coarse = generate_square(3);
  REQUIRE(r2.parent.size() == r2.elements.size());
  for (int e = 0; e < r2.num_elements(); ++e)
    for (int j = 0; j < 3; ++j) CHECK(coarse.barycentric(r2.parent[e], r2.vertex(e, j)).minCoeff() > -1e-14);
}

TEST_CASE("mesh stats handshake on random refinements") {
  for (int n = 1; n <= 5; ++n) {
    const MeshStats s = mesh_stats(generate_square(n));
    CHECK(s.n_facet == (3 * s.n_elem + s.n_boundary_facet) / 2);
  }
  const MeshStats d = mesh_stats(generate_polygonal_disk(2));
  CHECK(d.n_facet == (3 * d.n_elem + d.n_boundary_facet) / 2);
}

TEST_CASE("build_mesh rejects bad input") {
  std::vector<Point2> v{{0, 0}, {1, 0}, {0, 1}};
  CHECK_THROWS_AS(build_mesh(v, {{0, 2, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(v, {{0, 1, 5}}), std::invalid_argument);
  CHECK_NOTHROW(build_mesh(v, {{0, 1, 2}}));
}

TEST_CASE("text format round trip is bit exact") {
  Mesh m = generate_polygonal_disk(2, 1.7);
  std::stringstream ss;
  write_mesh(ss, m);
  const std::string text = ss.str();
  CHECK(text.rfind("hdgmesh 1", 0) == 0);
  const Mesh r = read_mesh(ss);
  REQUIRE(r.num_vertices() == m.num_vertices());
  for (int i = 0; i < m.num_vertices(); ++i) CHECK(r.vertices[i] == m.vertices[i]);
  for (int e = 0; e < m.num_elements(); ++e) CHECK(r.elements[e].vertices == m.elements[e].vertices);
  CHECK(mesh_hash(r) == mesh_hash(m));
  CHECK(mesh_hash(r) != mesh_hash(generate_polygonal_disk(2)));

  std::stringstream decimal("hdgmesh 1\nV 3\n0.1 0.2\n1.3 0.7\n0.3 1.9\nT 1\n0 1 2\n");
  const Mesh d = read_mesh(decimal);
  CHECK(d.vertices[0].x() == 0.1);
  CHECK(d.vertices[2].y() == 1.9);
  std::stringstream bad("hdgmesh 2\n");
  CHECK_THROWS(read_mesh(bad));
}
