#include "fasd/mesh.hpp"

#include <doctest.h>

#include <sstream>
#include <stdexcept>
#include <string>

using namespace fasd;

namespace {

double signed_area(const MeshLevel& m, int t)
{
  const auto& [a, b, c] = m.triangles[t];
  const Point& pa = m.vertices[a];
  const Point& pb = m.vertices[b];
  const Point& pc = m.vertices[c];
  return 0.5 * ((pb.x - pa.x) * (pc.y - pa.y) - (pc.x - pa.x) * (pb.y - pa.y));
}

void check_counts(const MeshLevel& m, int n)
{
  CHECK(m.cells_per_side == n);
  CHECK(m.num_vertices() == (n + 1) * (n + 1));
  CHECK(m.num_triangles() == 2 * n * n);
  CHECK(m.num_interior() == (n - 1) * (n - 1));
}

void check_geometry(const MeshLevel& m)
{
  double total = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t) {
    const double a = signed_area(m, t);
    CHECK(a > 0.0);
    total += a;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  for (int v = 0; v < m.num_vertices(); ++v) {
    const Point& p = m.vertices[v];
    const bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
    CHECK(m.is_boundary[v] == on_edge);
    CHECK(m.interior_index[v].has_value() == !on_edge);
    if (m.interior_index[v]) {
      CHECK(m.interior_vertices[*m.interior_index[v]] == v);
    }
  }
}

} // namespace

TEST_CASE("grid counts for small n")
{
  check_counts(build_unit_square_mesh(2), 2);
  check_counts(build_unit_square_mesh(4), 4);
  const MeshLevel one = build_unit_square_mesh(1);
  check_counts(one, 1);
  CHECK(one.num_interior() == 0);
  CHECK_THROWS_AS(build_unit_square_mesh(0), std::invalid_argument);
}

TEST_CASE("direct meshes are counterclockwise, tile the square and flag the boundary")
{
  for (int n : {1, 2, 3, 4, 7}) {
    check_geometry(build_unit_square_mesh(n));
  }
}

TEST_CASE("every cell is cut by its lower-left to upper-right diagonal")
{
  const MeshLevel m = build_unit_square_mesh(3);
  for (const auto& tri : m.triangles) {
    double xmin = 2, ymin = 2;
    for (int v : tri) {
      xmin = std::min(xmin, m.vertices[v].x);
      ymin = std::min(ymin, m.vertices[v].y);
    }
    bool has_ll = false;
    bool has_ur = false;
    for (int v : tri) {
      has_ll |= m.vertices[v].x == xmin && m.vertices[v].y == ymin;
      has_ur |= std::abs(m.vertices[v].x - xmin - 1.0 / 3) < 1e-15 &&
                std::abs(m.vertices[v].y - ymin - 1.0 / 3) < 1e-15;
    }
    CHECK(has_ll);
    CHECK(has_ur);
  }
}

TEST_CASE("refinement quadrisects, halves h and keeps coarse vertices first")
{
  const MeshLevel coarse = build_unit_square_mesh(2);
  const MeshLevel fine = refine(coarse);
  check_counts(fine, 4);
  check_geometry(fine);
  CHECK(fine.h == coarse.h / 2);
  CHECK(fine.level_index == coarse.level_index + 1);
  CHECK(fine.num_triangles() == 4 * coarse.num_triangles());
  for (int v = 0; v < coarse.num_vertices(); ++v) {
    CHECK(fine.vertices[v].x == coarse.vertices[v].x);
    CHECK(fine.vertices[v].y == coarse.vertices[v].y);
  }
  // coarse interior nodes are a prefix of the fine interior numbering
  for (int i = 0; i < coarse.num_interior(); ++i) {
    CHECK(fine.interior_vertices[i] == coarse.interior_vertices[i]);
  }
}

TEST_CASE("parent links: copies have one parent, midpoints bisect a coarse edge")
{
  const MeshLevel coarse = build_unit_square_mesh(4);
  const MeshLevel fine = refine(coarse);
  REQUIRE(fine.parents.size() == fine.vertices.size());
  int copies = 0;
  for (int v = 0; v < fine.num_vertices(); ++v) {
    const VertexParents& par = fine.parents[v];
    if (par.is_copy()) {
      ++copies;
      CHECK(par.first == v);
    } else {
      REQUIRE(par.first >= 0);
      REQUIRE(par.second >= 0);
      const Point& a = coarse.vertices[par.first];
      const Point& b = coarse.vertices[par.second];
      CHECK(fine.vertices[v].x == doctest::Approx(0.5 * (a.x + b.x)));
      CHECK(fine.vertices[v].y == doctest::Approx(0.5 * (a.y + b.y)));
      // the edge is an edge of the coarse mesh: endpoints at most one cell apart
      CHECK(std::abs(a.x - b.x) <= coarse.h + 1e-15);
      CHECK(std::abs(a.y - b.y) <= coarse.h + 1e-15);
    }
  }
  CHECK(copies == coarse.num_vertices());
}

TEST_CASE("hierarchies")
{
  const Hierarchy five = build_hierarchy(4, 5);
  REQUIRE(five.size() == 5);
  CHECK(five.back().h == 1.0 / 64);
  CHECK(five.front().h == 0.25);
  for (std::size_t l = 1; l < five.size(); ++l) {
    CHECK(five[l].h == five[l - 1].h / 2);
    CHECK(five[l].level_index == static_cast<int>(l));
  }
  const Hierarchy one = build_hierarchy(4, 1);
  REQUIRE(one.size() == 1);
  CHECK(one[0].h == 0.25);
  CHECK_THROWS_AS(build_hierarchy(4, 0), std::invalid_argument);

  const Hierarchy two = build_hierarchy(4, 3);
  CHECK(two.back().h == 1.0 / 16);
}

TEST_CASE("nine levels from 1/4 reach 1/1024")
{
  const Hierarchy deep = build_hierarchy(4, 9);
  CHECK(deep.back().h == 1.0 / 1024);
  CHECK(deep.back().num_interior() == 1023 * 1023);
}

TEST_CASE("mesh dump lists vertices then triangles")
{
  std::ostringstream os;
  write_mesh(os, build_unit_square_mesh(1));
  std::istringstream is(os.str());
  std::string tag;
  int vertices = 0;
  int triangles = 0;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    ls >> tag;
    if (tag == "v") {
      double x, y;
      int b;
      ls >> x >> y >> b;
      CHECK(ls);
      CHECK(b == 1);
      ++vertices;
    } else if (tag == "t") {
      int i, j, k;
      ls >> i >> j >> k;
      CHECK(ls);
      ++triangles;
    }
  }
  CHECK(vertices == 4);
  CHECK(triangles == 2);
}
