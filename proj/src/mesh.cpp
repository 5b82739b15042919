#include "ghdg/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ghdg {

Point2 Mesh::centroid(int e) const {
  return (vertex(e, 0) + vertex(e, 1) + vertex(e, 2)) / 3.0;
}

Eigen::Vector3d Mesh::barycentric(int e, const Point2& x) const {
  const Point2 a = vertex(e, 0), b = vertex(e, 1), c = vertex(e, 2);
  Eigen::Matrix2d J;
  J.col(0) = b - a;
  J.col(1) = c - a;
  const Eigen::Vector2d xi = J.inverse() * (x - a);
  return {1.0 - xi(0) - xi(1), xi(0), xi(1)};
}

Mesh build_mesh(std::vector<Point2> vertices, const std::vector<std::array<int, 3>>& triangles) {
  Mesh m;
  m.vertices = std::move(vertices);
  const int nv = m.num_vertices();
  m.elements.resize(triangles.size());

  std::unordered_map<std::uint64_t, int> edge_id;
  edge_id.reserve(triangles.size() * 2);

  for (std::size_t e = 0; e < triangles.size(); ++e) {
    Element& el = m.elements[e];
    el.vertices = triangles[e];
    for (int v : el.vertices)
      if (v < 0 || v >= nv) throw std::invalid_argument("build_mesh: vertex index out of range");
    const Point2 a = m.vertices[el.vertices[0]];
    const Point2 b = m.vertices[el.vertices[1]];
    const Point2 c = m.vertices[el.vertices[2]];
    const Point2 ab = b - a, ac = c - a;
    el.signed_area = 0.5 * (ab.x() * ac.y() - ab.y() * ac.x());
    if (!(el.signed_area > 0.0))
      throw std::invalid_argument("build_mesh: element " + std::to_string(e) +
                                  " is not counterclockwise or degenerate");
    el.h = std::max({ab.norm(), ac.norm(), (c - b).norm()});
    m.h_max = std::max(m.h_max, el.h);

    for (int j = 0; j < 3; ++j) {
      const int va = el.vertices[(j + 1) % 3];
      const int vb = el.vertices[(j + 2) % 3];
      const int lo = std::min(va, vb), hi = std::max(va, vb);
      el.orientation[j] = va < vb ? 1 : -1;
      const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
      auto [it, inserted] = edge_id.try_emplace(key, m.num_facets());
      if (inserted) {
        Facet f;
        f.vertices = {lo, hi};
        const Point2 d = m.vertices[hi] - m.vertices[lo];
        f.h = d.norm();
        f.tangent = d / f.h;
        m.facets.push_back(f);
      }
      Facet& f = m.facets[it->second];
      const int side = inserted ? 0 : 1;
      if (!inserted && f.elements[1] != -1)
        throw std::invalid_argument("build_mesh: non-manifold edge");
      f.elements[side] = static_cast<int>(e);
      f.local_index[side] = j;
      const Point2 d = m.vertices[vb] - m.vertices[va];
      f.normals[side] = Point2(d.y(), -d.x()) / d.norm();
      el.facets[j] = it->second;
    }
  }
  for (Facet& f : m.facets) f.boundary = f.elements[1] == -1;
  return m;
}

Mesh generate_square(int n) {
  if (n < 1) throw std::invalid_argument("generate_square: n must be >= 1");
  std::vector<Point2> v;
  v.reserve((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) v.emplace_back(double(i) / n, double(j) / n);
  std::vector<std::array<int, 3>> t;
  t.reserve(2 * n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int v00 = j * (n + 1) + i, v10 = v00 + 1, v01 = v00 + n + 1, v11 = v01 + 1;
      t.push_back({v00, v10, v11});
      t.push_back({v00, v11, v01});
    }
  return build_mesh(std::move(v), t);
}

namespace {

Point2 project_to_unit_circle(const Point2& p) { return p / p.norm(); }

}  // namespace

Mesh generate_polygonal_disk(int levels, std::optional<double> grading) {
  if (levels < 0) throw std::invalid_argument("generate_polygonal_disk: levels must be >= 0");
  std::vector<Point2> v{Point2::Zero()};
  for (int i = 0; i < 6; ++i) {
    const double a = M_PI / 3.0 * i;
    v.emplace_back(std::cos(a), std::sin(a));
  }
  std::vector<std::array<int, 3>> t;
  for (int i = 0; i < 6; ++i) t.push_back({0, 1 + i, 1 + (i + 1) % 6});
  Mesh m = build_mesh(std::move(v), t);
  for (int l = 0; l < levels; ++l) m = uniform_refine(m, project_to_unit_circle);

  if (grading && *grading != 1.0) {
    const double beta = *grading;
    if (!(beta > 0.0)) throw std::invalid_argument("generate_polygonal_disk: grading must be positive");
    std::vector<Point2> w = m.vertices;
    for (Point2& p : w) {
      const double r = p.norm();
      if (r > 0.0) p *= (1.0 - std::pow(std::max(0.0, 1.0 - r), beta)) / r;
    }
    std::vector<std::array<int, 3>> tri;
    tri.reserve(m.elements.size());
    for (const Element& e : m.elements) tri.push_back(e.vertices);
    std::vector<int> parent = m.parent;
    m = build_mesh(std::move(w), tri);
    m.parent = std::move(parent);
  }
  return m;
}

Mesh uniform_refine(const Mesh& m, const BoundaryProjection& project) {
  const int nv = m.num_vertices();
  std::vector<Point2> v = m.vertices;
  v.reserve(nv + m.num_facets());
  for (const Facet& f : m.facets) {
    Point2 mid = 0.5 * (m.vertices[f.vertices[0]] + m.vertices[f.vertices[1]]);
    if (f.boundary && project) mid = project(mid);
    v.push_back(mid);
  }
  std::vector<std::array<int, 3>> t;
  t.reserve(4 * m.elements.size());
  std::vector<int> parent;
  parent.reserve(4 * m.elements.size());
  for (int e = 0; e < m.num_elements(); ++e) {
    const Element& el = m.elements[e];
    const int a = el.vertices[0], b = el.vertices[1], c = el.vertices[2];
    const int mbc = nv + el.facets[0], mca = nv + el.facets[1], mab = nv + el.facets[2];
    t.push_back({a, mab, mca});
    t.push_back({mab, b, mbc});
    t.push_back({mca, mbc, c});
    t.push_back({mbc, mca, mab});
    for (int i = 0; i < 4; ++i) parent.push_back(e);
  }
  Mesh r = build_mesh(std::move(v), t);
  r.parent = std::move(parent);
  return r;
}

MeshStats mesh_stats(const Mesh& m) {
  MeshStats s;
  s.n_elem = m.num_elements();
  s.n_facet = m.num_facets();
  s.n_boundary_facet = static_cast<int>(
      std::count_if(m.facets.begin(), m.facets.end(), [](const Facet& f) { return f.boundary; }));
  s.h_max = m.h_max;
  return s;
}

namespace {

void put_double(std::ostream& os, double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  os.write(buf, res.ptr - buf);
}

double parse_double(const std::string& tok) {
  double x = 0.0;
  auto res = std::from_chars(tok.data(), tok.data() + tok.size(), x);
  if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
    throw std::runtime_error("read_mesh: bad number '" + tok + "'");
  return x;
}

}  // namespace

void write_mesh(std::ostream& os, const Mesh& m) {
  os << "hdgmesh 1\n";
  os << "V " << m.num_vertices() << '\n';
  for (const Point2& p : m.vertices) {
    put_double(os, p.x());
    os << ' ';
    put_double(os, p.y());
    os << '\n';
  }
  os << "T " << m.num_elements() << '\n';
  for (const Element& e : m.elements)
    os << e.vertices[0] << ' ' << e.vertices[1] << ' ' << e.vertices[2] << '\n';
}

Mesh read_mesh(std::istream& is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "hdgmesh" || version != 1)
    throw std::runtime_error("read_mesh: missing 'hdgmesh 1' header");
  long nv = 0;
  if (!(is >> tag >> nv) || tag != "V" || nv < 0) throw std::runtime_error("read_mesh: bad vertex block");
  std::vector<Point2> v(nv);
  std::string sx, sy;
  for (long i = 0; i < nv; ++i) {
    if (!(is >> sx >> sy)) throw std::runtime_error("read_mesh: truncated vertex block");
    v[i] = Point2(parse_double(sx), parse_double(sy));
  }
  long nt = 0;
  if (!(is >> tag >> nt) || tag != "T" || nt < 0) throw std::runtime_error("read_mesh: bad element block");
  std::vector<std::array<int, 3>> t(nt);
  for (long i = 0; i < nt; ++i)
    if (!(is >> t[i][0] >> t[i][1] >> t[i][2])) throw std::runtime_error("read_mesh: truncated element block");
  return build_mesh(std::move(v), t);
}

void write_mesh_file(const std::string& path, const Mesh& m) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh(os, m);
}

Mesh read_mesh_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_mesh(is);
}

std::uint64_t mesh_hash(const Mesh& m) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const Point2& p : m.vertices) {
    const double xy[2] = {p.x(), p.y()};
    mix(xy, sizeof(xy));
  }
  for (const Element& e : m.elements) mix(e.vertices.data(), sizeof(int) * 3);
  return h;
}

}  // namespace ghdg
