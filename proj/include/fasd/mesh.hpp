/** @file

    @brief Uniform triangulations of the unit square and their quadrisection
    hierarchy.
*/

#ifndef FASD_MESH_HPP
#define FASD_MESH_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fasd {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Coarse-level origin of a fine vertex: either a copy of one coarse vertex
/// or the midpoint of a coarse edge.
struct VertexParents {
  int first = -1;
  int second = -1; ///< -1 for a copied vertex

  bool is_copy() const { return first >= 0 && second < 0; }
};

/**
   @brief One level of the unit-square triangulation.

   Vertices of a refined level start with the vertices of its parent level,
   in the same order; interior degrees of freedom are numbered by filtering
   the vertex list, so coarse interior indices are a prefix of fine ones.
*/
struct MeshLevel {
  int level_index = 0;
  int cells_per_side = 0;
  double h = 0.0;
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles; ///< counterclockwise
  std::vector<bool> is_boundary;
  std::vector<std::optional<int>> interior_index;
  std::vector<int> interior_vertices; ///< inverse of interior_index
  std::vector<VertexParents> parents; ///< empty on a level built directly

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  int num_interior() const { return static_cast<int>(interior_vertices.size()); }

  double triangle_area(int t) const;
};

using Hierarchy = std::vector<MeshLevel>;

/// n x n grid of squares, each cut along the lower-left to upper-right diagonal.
MeshLevel build_unit_square_mesh(int n);

/// Quadrisection: every triangle is split through its edge midpoints.
MeshLevel refine(const MeshLevel& coarse);

/// levels[0] is the coarsest; each further level refines the previous one.
Hierarchy build_hierarchy(int coarse_n, int num_levels);

/// Debug dump: "v x y b" per vertex, then "t i j k" per triangle.
void write_mesh(std::ostream& os, const MeshLevel& mesh);

} // namespace fasd

#endif // FASD_MESH_HPP
