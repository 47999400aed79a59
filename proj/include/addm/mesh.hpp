#ifndef ADDM_MESH_HPP
#define ADDM_MESH_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "addm/geometry.hpp"

namespace addm {

// Conforming triangular mesh with per-element polynomial degrees.
// Immutable after construction; refinement produces a new mesh that keeps
// a parent link per element for transfer between meshes of one hierarchy.
class TriMesh {
 public:
  struct Edge {
    int v0 = -1, v1 = -1;        // v0 < v1
    int elem[2] = {-1, -1};      // adjacent elements, elem[1] = -1 on boundary
    int tag = 0;                 // boundary tag (0 = interior)
  };

  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
  std::vector<int> degree;                    // p_K >= 1
  std::vector<int> parent;                    // element in the source mesh, -1 if none
  std::uint64_t lineage = 0;                  // shared by meshes of one hierarchy

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_elements() const { return static_cast<int>(triangles.size()); }

  Triangle triangle(int k) const {
    const auto& t = triangles[k];
    return {vertices[t[0]], vertices[t[1]], vertices[t[2]]};
  }
  double element_area(int k) const { return signed_area(triangle(k)); }
  double total_area() const;

  // Derived connectivity; built once by finalize().
  const std::vector<Edge>& edges() const { return edges_; }
  // Global edge id of the local edge (i, i+1 mod 3) of element k.
  const std::array<int, 3>& element_edges(int k) const { return elem_edges_[k]; }
  // Neighbor across local edge le of element k, or -1.
  int neighbor(int k, int le) const;

  // Builds edge tables and validates orientation, conformity and degrees.
  // Throws ConfigError on an invalid mesh.
  void finalize();
  bool finalized() const { return !elem_edges_.empty() || triangles.empty(); }

 private:
  std::vector<Edge> edges_;
  std::vector<std::array<int, 3>> elem_edges_;
};

// Uniform triangulation of a rectangle: nx*ny cells, each split along the
// lower-left to upper-right diagonal; 2*nx*ny triangles of degree p.
TriMesh build_structured_mesh(int nx, int ny, const Rect& domain, int p = 1);

// Red refinement of the marked elements with green closure. Children carry
// the parent's degree and a link to the parent element.
TriMesh refine(const TriMesh& mesh, const std::vector<int>& marked);

// Weighted element adjacency graph; weight[K] = n*(q+1)*(p_K+1)(p_K+2)/2.
struct ElementGraph {
  int num_nodes = 0;
  std::vector<std::pair<int, int>> edges;     // element pairs sharing an edge
  std::vector<long long> node_weight;
  std::vector<std::vector<int>> neighbors;    // adjacency lists
  long long total_weight() const;
};

ElementGraph adjacency_graph(const TriMesh& mesh, int n_components, int temporal_degree);

// Matching of boundary edges on opposite sides of the domain bounding box,
// used for periodic problems. Throws if any boundary edge has no partner.
struct PeriodicPair {
  int edge = -1;
  int partner = -1;
  Point2 offset;  // translation carrying this edge onto the partner
};
std::vector<PeriodicPair> periodic_pairs(const TriMesh& mesh);

// Text format: line 1 "NV NT"; NV lines "x y"; NT lines "v0 v1 v2 p".
// Coordinates are written with 17 significant digits so write/read
// round-trips bit-exactly.
void write_mesh_text(const TriMesh& mesh, const std::string& path);
TriMesh read_mesh_text(const std::string& path);

std::uint64_t fresh_lineage_token();

}  // namespace addm

#endif
