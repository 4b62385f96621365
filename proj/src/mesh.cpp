#include "fasd/mesh.hpp"

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

namespace fasd {

namespace {

bool on_unit_square_boundary(const Point& p)
{
  return p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
}

void number_interior(MeshLevel& mesh)
{
  const auto nv = mesh.vertices.size();
  mesh.is_boundary.assign(nv, false);
  mesh.interior_index.assign(nv, std::nullopt);
  mesh.interior_vertices.clear();
  for (std::size_t v = 0; v < nv; ++v) {
    mesh.is_boundary[v] = on_unit_square_boundary(mesh.vertices[v]);
    if (!mesh.is_boundary[v]) {
      mesh.interior_index[v] = static_cast<int>(mesh.interior_vertices.size());
      mesh.interior_vertices.push_back(static_cast<int>(v));
    }
  }
}

} // namespace

double MeshLevel::triangle_area(int t) const
{
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

MeshLevel build_unit_square_mesh(int n)
{
  if (n < 1) {
    throw std::invalid_argument("build_unit_square_mesh: n must be >= 1, got " +
                                std::to_string(n));
  }
  MeshLevel mesh;
  mesh.cells_per_side = n;
  mesh.h = 1.0 / n;
  mesh.vertices.reserve(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.vertices.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
    }
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int ll = id(i, j), lr = id(i + 1, j), ul = id(i, j + 1), ur = id(i + 1, j + 1);
      mesh.triangles.push_back({ll, lr, ur});
      mesh.triangles.push_back({ll, ur, ul});
    }
  }
  number_interior(mesh);
  return mesh;
}

MeshLevel refine(const MeshLevel& coarse)
{
  if (coarse.vertices.empty() || coarse.triangles.empty()) {
    throw std::invalid_argument("refine: empty mesh");
  }
  MeshLevel fine;
  fine.level_index = coarse.level_index + 1;
  fine.cells_per_side = 2 * coarse.cells_per_side;
  fine.h = 0.5 * coarse.h;
  fine.vertices = coarse.vertices;
  fine.parents.reserve(coarse.vertices.size() * 4);
  for (int v = 0; v < coarse.num_vertices(); ++v) {
    fine.parents.push_back({v, -1});
  }

  std::map<std::pair<int, int>, int> midpoint;
  auto midpoint_of = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) {
      return it->second;
    }
    const Point& pa = coarse.vertices[a];
    const Point& pb = coarse.vertices[b];
    const int id = static_cast<int>(fine.vertices.size());
    fine.vertices.push_back({0.5 * (pa.x + pb.x), 0.5 * (pa.y + pb.y)});
    fine.parents.push_back({key.first, key.second});
    midpoint.emplace(key, id);
    return id;
  };

  fine.triangles.reserve(4 * coarse.triangles.size());
  for (const auto& t : coarse.triangles) {
    const int a = t[0], b = t[1], c = t[2];
    const int ab = midpoint_of(a, b);
    const int bc = midpoint_of(b, c);
    const int ca = midpoint_of(c, a);
    fine.triangles.push_back({a, ab, ca});
    fine.triangles.push_back({ab, b, bc});
    fine.triangles.push_back({ca, bc, c});
    fine.triangles.push_back({ab, bc, ca});
  }
  number_interior(fine);
  return fine;
}

Hierarchy build_hierarchy(int coarse_n, int num_levels)
{
  if (num_levels < 1) {
    throw std::invalid_argument("build_hierarchy: num_levels must be >= 1, got " +
                                std::to_string(num_levels));
  }
  Hierarchy levels;
  levels.reserve(num_levels);
  levels.push_back(build_unit_square_mesh(coarse_n));
  for (int l = 1; l < num_levels; ++l) {
    levels.push_back(refine(levels.back()));
  }
  return levels;
}

void write_mesh(std::ostream& os, const MeshLevel& mesh)
{
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    os << "v " << mesh.vertices[v].x << ' ' << mesh.vertices[v].y << ' '
       << (mesh.is_boundary[v] ? 1 : 0) << '\n';
  }
  for (const auto& t : mesh.triangles) {
    os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  }
}

} // namespace fasd
