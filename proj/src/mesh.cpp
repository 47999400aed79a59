#include "addm/mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "addm/errors.hpp"

namespace addm {

std::uint64_t fresh_lineage_token() {
  static std::atomic<std::uint64_t> next{1};
  return next.fetch_add(1);
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (int k = 0; k < num_elements(); ++k) a += element_area(k);
  return a;
}

int TriMesh::neighbor(int k, int le) const {
  const Edge& e = edges_[elem_edges_[k][le]];
  return e.elem[0] == k ? e.elem[1] : e.elem[0];
}

void TriMesh::finalize() {
  const int nt = num_elements();
  if (static_cast<int>(degree.size()) != nt)
    throw ConfigError("TriMesh: degree array size mismatch");
  for (int k = 0; k < nt; ++k) {
    if (degree[k] < 1) throw ConfigError("TriMesh: element degree must be >= 1");
    if (element_area(k) <= 0.0)
      throw ConfigError("TriMesh: element " + std::to_string(k) +
                        " has non-positive signed area");
  }
  edges_.clear();
  elem_edges_.assign(nt, {-1, -1, -1});
  std::map<std::pair<int, int>, int> lookup;
  for (int k = 0; k < nt; ++k) {
    for (int le = 0; le < 3; ++le) {
      int a = triangles[k][le];
      int b = triangles[k][(le + 1) % 3];
      auto key = std::minmax(a, b);
      auto it = lookup.find(key);
      if (it == lookup.end()) {
        Edge e;
        e.v0 = key.first;
        e.v1 = key.second;
        e.elem[0] = k;
        lookup.emplace(key, static_cast<int>(edges_.size()));
        elem_edges_[k][le] = static_cast<int>(edges_.size());
        edges_.push_back(e);
      } else {
        Edge& e = edges_[it->second];
        if (e.elem[1] != -1)
          throw ConfigError("TriMesh: edge shared by more than two elements");
        e.elem[1] = k;
        elem_edges_[k][le] = it->second;
      }
    }
  }
  for (auto& e : edges_) e.tag = (e.elem[1] == -1) ? 1 : 0;
}

TriMesh build_structured_mesh(int nx, int ny, const Rect& domain, int p) {
  if (nx < 1 || ny < 1) throw ConfigError("build_structured_mesh: nx, ny >= 1 required");
  if (p < 1) throw ConfigError("build_structured_mesh: degree >= 1 required");
  TriMesh m;
  m.lineage = fresh_lineage_token();
  const double hx = domain.width() / nx;
  const double hy = domain.height() / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({domain.x0 + i * hx, domain.y0 + j * hy});
  auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int v00 = vid(i, j), v10 = vid(i + 1, j);
      int v01 = vid(i, j + 1), v11 = vid(i + 1, j + 1);
      m.triangles.push_back({v00, v10, v11});
      m.triangles.push_back({v00, v11, v01});
    }
  }
  m.degree.assign(m.triangles.size(), p);
  m.parent.assign(m.triangles.size(), -1);
  m.finalize();
  return m;
}

TriMesh refine(const TriMesh& mesh, const std::vector<int>& marked) {
  const int nt = mesh.num_elements();
  for (int k : marked)
    if (k < 0 || k >= nt) throw ConfigError("refine: marked element out of range");

  std::vector<char> red(nt, 0);
  for (int k : marked) red[k] = 1;

  const auto& edges = mesh.edges();
  std::vector<char> split(edges.size(), 0);
  auto mark_edges = [&](int k) {
    for (int le = 0; le < 3; ++le) split[mesh.element_edges(k)[le]] = 1;
  };
  for (int k = 0; k < nt; ++k)
    if (red[k]) mark_edges(k);

  // Closure: an element with two or more split edges becomes red.
  bool again = true;
  while (again) {
    again = false;
    for (int k = 0; k < nt; ++k) {
      if (red[k]) continue;
      int c = 0;
      for (int le = 0; le < 3; ++le) c += split[mesh.element_edges(k)[le]];
      if (c >= 2) {
        red[k] = 1;
        mark_edges(k);
        again = true;
      }
    }
  }

  TriMesh out;
  out.lineage = mesh.lineage;
  out.vertices = mesh.vertices;
  std::vector<int> mid(edges.size(), -1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!split[e]) continue;
    mid[e] = out.num_vertices();
    out.vertices.push_back(midpoint(mesh.vertices[edges[e].v0], mesh.vertices[edges[e].v1]));
  }

  auto add = [&](int a, int b, int c, int par) {
    out.triangles.push_back({a, b, c});
    out.degree.push_back(mesh.degree[par]);
    out.parent.push_back(par);
  };

  for (int k = 0; k < nt; ++k) {
    const auto& t = mesh.triangles[k];
    const auto& ee = mesh.element_edges(k);
    if (red[k]) {
      int m01 = mid[ee[0]], m12 = mid[ee[1]], m20 = mid[ee[2]];
      add(t[0], m01, m20, k);
      add(m01, t[1], m12, k);
      add(m20, m12, t[2], k);
      add(m01, m12, m20, k);
      continue;
    }
    int ns = 0, which = -1;
    for (int le = 0; le < 3; ++le) {
      if (split[ee[le]]) {
        ++ns;
        which = le;
      }
    }
    if (ns == 0) {
      add(t[0], t[1], t[2], k);
    } else {
      // Green split: hanging midpoint joined to the opposite vertex.
      int a = t[which], b = t[(which + 1) % 3], c = t[(which + 2) % 3];
      int m = mid[ee[which]];
      add(a, m, c, k);
      add(m, b, c, k);
    }
  }
  out.finalize();
  return out;
}

ElementGraph adjacency_graph(const TriMesh& mesh, int n_components, int temporal_degree) {
  if (n_components < 1 || temporal_degree < 0)
    throw ConfigError("adjacency_graph: need n >= 1 and q >= 0");
  ElementGraph g;
  g.num_nodes = mesh.num_elements();
  g.node_weight.resize(g.num_nodes);
  for (int k = 0; k < g.num_nodes; ++k) {
    long long dk = static_cast<long long>(mesh.degree[k] + 1) * (mesh.degree[k] + 2) / 2;
    g.node_weight[k] = static_cast<long long>(n_components) * (temporal_degree + 1) * dk;
  }
  g.neighbors.resize(g.num_nodes);
  for (const auto& e : mesh.edges()) {
    if (e.elem[1] == -1) continue;
    g.edges.emplace_back(e.elem[0], e.elem[1]);
    g.neighbors[e.elem[0]].push_back(e.elem[1]);
    g.neighbors[e.elem[1]].push_back(e.elem[0]);
  }
  for (auto& lst : g.neighbors) std::sort(lst.begin(), lst.end());
  return g;
}

long long ElementGraph::total_weight() const {
  long long s = 0;
  for (long long w : node_weight) s += w;
  return s;
}

std::vector<PeriodicPair> periodic_pairs(const TriMesh& mesh) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (const auto& v : mesh.vertices) {
    x0 = std::min(x0, v.x);
    y0 = std::min(y0, v.y);
    x1 = std::max(x1, v.x);
    y1 = std::max(y1, v.y);
  }
  const double w = x1 - x0, h = y1 - y0;
  const double tol = 1e-9 * std::max(w, h);

  std::vector<int> bnd;
  const auto& edges = mesh.edges();
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edges[e].elem[1] == -1) bnd.push_back(static_cast<int>(e));

  auto edge_mid = [&](int e) {
    return midpoint(mesh.vertices[edges[e].v0], mesh.vertices[edges[e].v1]);
  };
  std::vector<PeriodicPair> pairs;
  for (int e : bnd) {
    Point2 m = edge_mid(e);
    Point2 offset{0.0, 0.0};
    if (std::abs(m.x - x0) < tol) offset = {w, 0.0};
    else if (std::abs(m.x - x1) < tol) offset = {-w, 0.0};
    else if (std::abs(m.y - y0) < tol) offset = {0.0, h};
    else if (std::abs(m.y - y1) < tol) offset = {0.0, -h};
    else throw ConfigError("periodic_pairs: boundary edge not on the bounding box");
    Point2 target = m + offset;
    int found = -1;
    for (int e2 : bnd) {
      if (e2 == e) continue;
      Point2 m2 = edge_mid(e2);
      if (std::abs(m2.x - target.x) < tol && std::abs(m2.y - target.y) < tol) {
        found = e2;
        break;
      }
    }
    if (found == -1)
      throw ConfigError("periodic_pairs: no matching edge across the domain for edge " +
                        std::to_string(e));
    pairs.push_back({e, found, offset});
  }
  return pairs;
}

void write_mesh_text(const TriMesh& mesh, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_mesh_text: cannot open " + path);
  f << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  char buf[64];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", v.x, v.y);
    f << buf;
  }
  for (int k = 0; k < mesh.num_elements(); ++k) {
    const auto& t = mesh.triangles[k];
    f << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << mesh.degree[k] << '\n';
  }
}

TriMesh read_mesh_text(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("read_mesh_text: cannot open " + path);
  int nv = 0, nt = 0;
  if (!(f >> nv >> nt) || nv < 3 || nt < 1)
    throw ConfigError("read_mesh_text: malformed header in " + path);
  TriMesh m;
  m.lineage = fresh_lineage_token();
  m.vertices.resize(nv);
  for (auto& v : m.vertices)
    if (!(f >> v.x >> v.y)) throw ConfigError("read_mesh_text: bad vertex line");
  m.triangles.resize(nt);
  m.degree.resize(nt);
  m.parent.assign(nt, -1);
  for (int k = 0; k < nt; ++k) {
    auto& t = m.triangles[k];
    if (!(f >> t[0] >> t[1] >> t[2] >> m.degree[k]))
      throw ConfigError("read_mesh_text: bad element line");
  }
  m.finalize();
  return m;
}

}  // namespace addm
