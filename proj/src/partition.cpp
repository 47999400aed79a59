#include "addm/partition.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <numeric>

#include "addm/errors.hpp"

namespace addm {

namespace {

// Multi-source BFS distances; -1 for unreachable nodes.
std::vector<int> bfs_distances(const std::vector<std::vector<int>>& adj,
                               const std::vector<int>& sources) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue;
  for (int s : sources) {
    dist[s] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : adj[v])
      if (dist[u] == -1) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
  }
  return dist;
}

// True when part `p` stays connected after removing node v.
bool connected_without(const std::vector<std::vector<int>>& adj, const std::vector<int>& part_of,
                       int p, int v, int part_size) {
  if (part_size <= 2) return true;
  int start = -1;
  for (int u : adj[v])
    if (part_of[u] == p) {
      start = u;
      break;
    }
  if (start == -1) return false;
  std::vector<int> seen;
  std::deque<int> queue{start};
  std::vector<char> visited(adj.size(), 0);
  visited[start] = 1;
  visited[v] = 1;  // excluded
  int count = 1;
  while (!queue.empty()) {
    int w = queue.front();
    queue.pop_front();
    for (int u : adj[w]) {
      if (part_of[u] == p && !visited[u]) {
        visited[u] = 1;
        ++count;
        queue.push_back(u);
      }
    }
  }
  return count == part_size - 1;
}

// One growing attempt from a given seed node.
std::vector<int> grow_once(const std::vector<std::vector<int>>& adj,
                           const std::vector<long long>& weight, int nparts,
                           unsigned long long seed, int refine_passes) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> part_of(n, -1);
  if (nparts == 1) {
    std::fill(part_of.begin(), part_of.end(), 0);
    return part_of;
  }

  // Seeds by farthest-point traversal for spatial spread.
  std::vector<int> seeds{static_cast<int>(seed % n)};
  while (static_cast<int>(seeds.size()) < nparts) {
    auto dist = bfs_distances(adj, seeds);
    int best = -1, best_d = -1;
    for (int v = 0; v < n; ++v)
      if (part_of[v] == -1 && dist[v] > best_d &&
          std::find(seeds.begin(), seeds.end(), v) == seeds.end()) {
        best_d = dist[v];
        best = v;
      }
    if (best == -1) {
      for (int v = 0; v < n; ++v)
        if (std::find(seeds.begin(), seeds.end(), v) == seeds.end()) {
          best = v;
          break;
        }
    }
    seeds.push_back(best);
  }

  std::vector<long long> pw(nparts, 0);
  std::vector<char> active(nparts, 1);
  int assigned = 0;
  for (int p = 0; p < nparts; ++p) {
    part_of[seeds[p]] = p;
    pw[p] = weight[seeds[p]];
    ++assigned;
  }

  // Lightest active part absorbs one adjacent node at a time; the node with
  // the most links into the part wins, smaller index on ties.
  while (assigned < n) {
    int p = -1;
    long long pw_min = 0;
    for (int q = 0; q < nparts; ++q)
      if (active[q] && (p == -1 || pw[q] < pw_min)) {
        p = q;
        pw_min = pw[q];
      }
    if (p == -1) break;  // all frontiers exhausted
    int best = -1, best_links = -1;
    for (int v = 0; v < n; ++v) {
      if (part_of[v] != -1) continue;
      int links = 0;
      for (int u : adj[v])
        if (part_of[u] == p) ++links;
      if (links > best_links && links > 0) {
        best_links = links;
        best = v;
      }
    }
    if (best == -1) {
      active[p] = 0;
      continue;
    }
    part_of[best] = p;
    pw[p] += weight[best];
    ++assigned;
  }
  // Leftovers (disconnected graphs): attach to the lightest adjacent part,
  // sweeping until everything is assigned.
  bool progress = true;
  while (assigned < n && progress) {
    progress = false;
    for (int v = 0; v < n; ++v) {
      if (part_of[v] != -1) continue;
      int best = -1;
      for (int u : adj[v])
        if (part_of[u] != -1 && (best == -1 || pw[part_of[u]] < pw[best])) best = part_of[u];
      if (best != -1) {
        part_of[v] = best;
        pw[best] += weight[v];
        ++assigned;
        progress = true;
      }
    }
  }
  if (assigned < n)
    throw ConfigError("partition: graph has more connected components than parts");

  // Boundary refinement: move a node to a neighbor part when that lowers
  // the pairwise weight maximum and keeps the donor connected.
  std::vector<int> part_size(nparts, 0);
  for (int v = 0; v < n; ++v) ++part_size[part_of[v]];
  for (int pass = 0; pass < refine_passes; ++pass) {
    bool moved = false;
    for (int v = 0; v < n; ++v) {
      const int p = part_of[v];
      if (part_size[p] <= 1) continue;
      int best_q = -1;
      long long best_obj = 0;
      for (int u : adj[v]) {
        const int q = part_of[u];
        if (q == p || q == best_q) continue;
        const long long cur = std::max(pw[p], pw[q]);
        const long long after = std::max(pw[p] - weight[v], pw[q] + weight[v]);
        if (after < cur) {
          const long long obj = after;
          if (best_q == -1 || obj < best_obj) {
            best_q = q;
            best_obj = obj;
          }
        }
      }
      if (best_q != -1 && connected_without(adj, part_of, p, v, part_size[p])) {
        pw[p] -= weight[v];
        pw[best_q] += weight[v];
        --part_size[p];
        ++part_size[best_q];
        part_of[v] = best_q;
        moved = true;
      }
    }
    if (!moved) break;
  }

  // Kernighan-Lin style swaps: exchange equal-weight boundary nodes when
  // that reduces the cut and keeps both parts connected.
  auto part_members = [&](int p) {
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
      if (part_of[v] == p) out.push_back(v);
    return out;
  };
  auto connected_part = [&](int p) {
    const auto members = part_members(p);
    if (members.empty()) return false;
    std::vector<char> seen(n, 0);
    std::deque<int> queue{members[0]};
    seen[members[0]] = 1;
    int count = 1;
    while (!queue.empty()) {
      int w = queue.front();
      queue.pop_front();
      for (int u : adj[w])
        if (part_of[u] == p && !seen[u]) {
          seen[u] = 1;
          ++count;
          queue.push_back(u);
        }
    }
    return count == static_cast<int>(members.size());
  };
  auto local_cut = [&](int v) {
    int c = 0;
    for (int u : adj[v])
      if (part_of[u] != part_of[v]) ++c;
    return c;
  };
  for (int pass = 0; pass < 3; ++pass) {
    bool swapped = false;
    for (int v = 0; v < n; ++v) {
      const int p = part_of[v];
      for (int u : adj[v]) {
        const int q = part_of[u];
        if (q == p || weight[u] != weight[v]) continue;
        const int before = local_cut(v) + local_cut(u);
        std::swap(part_of[v], part_of[u]);
        const int after = local_cut(v) + local_cut(u);
        if (after < before && connected_part(p) && connected_part(q)) {
          swapped = true;
          break;  // v moved; re-evaluate from the next node
        }
        std::swap(part_of[v], part_of[u]);
      }
    }
    if (!swapped) break;
  }

  // Chain rebalancing: shift one node along a path of parts from the
  // heaviest to the lightest part; handles non-adjacent imbalance that
  // pairwise moves cannot reach.
  auto move_one = [&](int from, int to) {
    int pick = -1, best_links = -1;
    for (int v = 0; v < n; ++v) {
      if (part_of[v] != from || part_size[from] <= 1) continue;
      int links = 0;
      for (int u : adj[v])
        if (part_of[u] == to) ++links;
      if (links > best_links && links > 0 &&
          connected_without(adj, part_of, from, v, part_size[from])) {
        best_links = links;
        pick = v;
      }
    }
    if (pick == -1) return false;
    pw[from] -= weight[pick];
    pw[to] += weight[pick];
    --part_size[from];
    ++part_size[to];
    part_of[pick] = to;
    return true;
  };
  for (int round = 0; round < 4 * nparts; ++round) {
    int heavy = 0, light = 0;
    for (int q = 1; q < nparts; ++q) {
      if (pw[q] > pw[heavy]) heavy = q;
      if (pw[q] < pw[light]) light = q;
    }
    long long min_node = pw[heavy];
    for (int v = 0; v < n; ++v)
      if (part_of[v] == heavy) min_node = std::min(min_node, weight[v]);
    if (heavy == light || pw[heavy] - pw[light] < 2 * min_node) break;
    // Shortest part-adjacency path heavy -> light.
    std::vector<std::set<int>> padj(nparts);
    for (int v = 0; v < n; ++v)
      for (int u : adj[v])
        if (part_of[v] != part_of[u]) padj[part_of[v]].insert(part_of[u]);
    std::vector<int> prev(nparts, -1);
    std::deque<int> queue{heavy};
    prev[heavy] = heavy;
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop_front();
      if (p == light) break;
      for (int q : padj[p])
        if (prev[q] == -1) {
          prev[q] = p;
          queue.push_back(q);
        }
    }
    if (prev[light] == -1) break;
    std::vector<int> path{light};
    while (path.back() != heavy) path.push_back(prev[path.back()]);
    bool ok = true;
    for (std::size_t h = path.size(); h-- > 1 && ok;) ok = move_one(path[h], path[h - 1]);
    if (!ok) break;
  }
  return part_of;
}

// Grow `nparts` connected, weight-balanced parts; a few restarts from
// different seed nodes, keeping the best-balanced attempt.
std::vector<int> grow_balanced_parts(const std::vector<std::vector<int>>& adj,
                                     const std::vector<long long>& weight, int nparts,
                                     unsigned long long seed, int refine_passes) {
  const int n = static_cast<int>(adj.size());
  long long min_node = weight.empty() ? 0 : weight[0];
  for (long long w : weight) min_node = std::min(min_node, w);

  std::vector<int> best;
  std::pair<long long, long long> best_obj{0, 0};  // (max weight, sum of squares)
  for (int attempt = 0; attempt < 6; ++attempt) {
    auto part_of = grow_once(adj, weight, nparts, seed + 1000003ULL * attempt, refine_passes);
    std::vector<long long> pw(nparts, 0);
    for (int v = 0; v < n; ++v) pw[part_of[v]] += weight[v];
    long long maxw = 0, minw = pw[0], ssq = 0;
    for (long long w : pw) {
      maxw = std::max(maxw, w);
      minw = std::min(minw, w);
      ssq += w * w;
    }
    if (best.empty() || std::make_pair(maxw, ssq) < best_obj) {
      best = std::move(part_of);
      best_obj = {maxw, ssq};
    }
    if (maxw - minw < 2 * min_node) break;  // no single move could improve
  }
  return best;
}

}  // namespace

std::vector<std::vector<int>> DecompPlan::subdomain_elements() const {
  std::vector<std::vector<int>> out(num_subdomains);
  for (std::size_t k = 0; k < subdomain_of.size(); ++k) out[subdomain_of[k]].push_back((int)k);
  return out;
}

std::vector<std::vector<int>> DecompPlan::coarse_element_members() const {
  std::vector<std::vector<int>> out(num_coarse_elements());
  for (std::size_t k = 0; k < coarse_of.size(); ++k) out[coarse_of[k]].push_back((int)k);
  return out;
}

DecompPlan partition_elements(const ElementGraph& graph, int num_subdomains, double balance_tol,
                              unsigned long long seed) {
  const int n = graph.num_nodes;
  if (num_subdomains < 1) throw ConfigError("partition_elements: M >= 1 required");
  if (num_subdomains > n)
    throw ConfigError("partition_elements: M = " + std::to_string(num_subdomains) +
                      " exceeds the element count " + std::to_string(n));

  DecompPlan plan;
  plan.num_subdomains = num_subdomains;
  plan.seed = seed;
  plan.subdomain_of = grow_balanced_parts(graph.neighbors, graph.node_weight, num_subdomains,
                                          seed, /*refine_passes=*/10);
  plan.subdomain_weight.assign(num_subdomains, 0);
  for (int v = 0; v < n; ++v) plan.subdomain_weight[plan.subdomain_of[v]] += graph.node_weight[v];
  const double mean =
      static_cast<double>(graph.total_weight()) / static_cast<double>(num_subdomains);
  for (long long w : plan.subdomain_weight)
    if (static_cast<double>(w) > (1.0 + balance_tol) * mean) plan.balance_warning = true;
  return plan;
}

DecompPlan split_coarse(const DecompPlan& plan, int splitting, const ElementGraph& graph) {
  if (splitting < 1) throw ConfigError("split_coarse: s >= 1 required");
  DecompPlan out = plan;
  out.splitting = splitting;
  out.coarse_of.assign(plan.subdomain_of.size(), -1);

  const auto subs = plan.subdomain_elements();
  for (int i = 0; i < plan.num_subdomains; ++i) {
    const auto& members = subs[i];
    if (static_cast<int>(members.size()) < splitting)
      throw ConfigError("split_coarse: subdomain " + std::to_string(i) + " has only " +
                        std::to_string(members.size()) + " elements, cannot split into " +
                        std::to_string(splitting));
    if (splitting == 1) {
      for (int k : members) out.coarse_of[k] = i;
      continue;
    }
    // Induced subgraph in local ids.
    std::vector<int> local(graph.num_nodes, -1);
    for (std::size_t l = 0; l < members.size(); ++l) local[members[l]] = static_cast<int>(l);
    std::vector<std::vector<int>> adj(members.size());
    std::vector<long long> weight(members.size());
    for (std::size_t l = 0; l < members.size(); ++l) {
      weight[l] = graph.node_weight[members[l]];
      for (int u : graph.neighbors[members[l]])
        if (local[u] >= 0) adj[l].push_back(local[u]);
    }
    auto sub_parts = grow_balanced_parts(adj, weight, splitting, plan.seed + i, 10);
    for (std::size_t l = 0; l < members.size(); ++l)
      out.coarse_of[members[l]] = i * splitting + sub_parts[l];
  }
  return out;
}

SubdomainLayout subdomain_block_layout(const DecompPlan& plan, const ElementGraph& graph) {
  SubdomainLayout layout;
  const int m = plan.num_subdomains;
  layout.offsets.assign(m + 1, 0);
  layout.sizes.assign(m, 0);
  for (int v = 0; v < graph.num_nodes; ++v)
    layout.sizes[plan.subdomain_of[v]] += graph.node_weight[v];
  for (int i = 0; i < m; ++i) layout.offsets[i + 1] = layout.offsets[i] + layout.sizes[i];
  layout.element_order.resize(graph.num_nodes);
  std::iota(layout.element_order.begin(), layout.element_order.end(), 0);
  std::stable_sort(layout.element_order.begin(), layout.element_order.end(),
                   [&](int a, int b) { return plan.subdomain_of[a] < plan.subdomain_of[b]; });
  layout.max_local_size = *std::max_element(layout.sizes.begin(), layout.sizes.end());
  return layout;
}

void write_plan_csv(const DecompPlan& plan, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_plan_csv: cannot open " + path);
  f << "element_id,subdomain,coarse_element\n";
  for (std::size_t k = 0; k < plan.subdomain_of.size(); ++k) {
    f << k << ',' << plan.subdomain_of[k] << ','
      << (plan.coarse_of.empty() ? -1 : plan.coarse_of[k]) << '\n';
  }
}

}  // namespace addm
