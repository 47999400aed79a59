#include "addm/sparse_lu.hpp"

#include <algorithm>
#include <cmath>

#include "addm/errors.hpp"

namespace addm {

std::vector<int> minimum_degree_order(const std::vector<std::vector<int>>& adjacency) {
  const int n = static_cast<int>(adjacency.size());
  std::vector<std::vector<int>> adj(n);
  for (int v = 0; v < n; ++v) {
    adj[v] = adjacency[v];
    std::sort(adj[v].begin(), adj[v].end());
    adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
    adj[v].erase(std::remove(adj[v].begin(), adj[v].end(), v), adj[v].end());
  }
  std::vector<char> eliminated(n, 0);
  std::vector<int> order;
  order.reserve(n);
  std::vector<int> tmp;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::size_t best_deg = static_cast<std::size_t>(-1);
    for (int v = 0; v < n; ++v) {
      if (eliminated[v]) continue;
      if (adj[v].size() < best_deg) {
        best_deg = adj[v].size();
        best = v;
      }
    }
    order.push_back(best);
    eliminated[best] = 1;
    // Neighbors of the eliminated node become a clique.
    const std::vector<int> nbrs = adj[best];
    for (int u : nbrs) {
      tmp.clear();
      std::set_union(adj[u].begin(), adj[u].end(), nbrs.begin(), nbrs.end(),
                     std::back_inserter(tmp));
      tmp.erase(std::remove_if(tmp.begin(), tmp.end(),
                               [&](int w) { return w == u || w == best || eliminated[w]; }),
                tmp.end());
      adj[u] = tmp;
    }
    adj[best].clear();
    adj[best].shrink_to_fit();
  }
  return order;
}

std::vector<int> expand_block_order(const std::vector<int>& block_order,
                                    const std::vector<int>& block_sizes) {
  std::vector<long long> offset(block_sizes.size());
  long long n = 0;
  for (std::size_t b = 0; b < block_sizes.size(); ++b) {
    offset[b] = n;
    n += block_sizes[b];
  }
  std::vector<int> order;
  order.reserve(n);
  for (int b : block_order)
    for (int i = 0; i < block_sizes[b]; ++i) order.push_back(static_cast<int>(offset[b] + i));
  return order;
}

SparseLU SparseLU::factorize(const BlockSparseMatrix::Csc& a, const std::vector<int>& column_order,
                             const std::string& label) {
  const int n = a.n;
  if (static_cast<int>(column_order.size()) != n)
    throw ConfigError("SparseLU: column order size mismatch for " + label);

  SparseLU lu;
  lu.n_ = n;
  lu.pivot_row_.assign(n, -1);
  lu.col_of_pos_ = column_order;
  lu.l_ptr_.assign(n + 1, 0);
  lu.u_ptr_.assign(n + 1, 0);
  lu.u_diag_.assign(n, 0.0);

  double scale = 0.0;
  for (double v : a.values) scale = std::max(scale, std::abs(v));
  const double pivot_floor = 1e-14 * scale;

  std::vector<int> pinv(n, -1);        // original row -> pivot position
  std::vector<double> x(n, 0.0);       // dense accumulator, original rows
  std::vector<int> stamp(n, -1);       // pattern marks for rows
  std::vector<int> visited(n, -1);     // DFS marks for pivot positions
  std::vector<int> rowlist, topo;
  std::vector<int> dfs_stack, dfs_ptr;
  rowlist.reserve(64);
  topo.reserve(64);

  long long flops = 0;

  for (int k = 0; k < n; ++k) {
    const int jcol = column_order[k];
    rowlist.clear();
    topo.clear();

    // Scatter the column and run the symbolic reach through L.
    for (long long p = a.colptr[jcol]; p < a.colptr[jcol + 1]; ++p) {
      const int r = a.rowind[p];
      x[r] = a.values[p];
      if (stamp[r] != k) {
        stamp[r] = k;
        rowlist.push_back(r);
      }
      const int t = pinv[r];
      if (t >= 0 && visited[t] != k) {
        // Iterative DFS over earlier pivot columns.
        dfs_stack.assign(1, t);
        dfs_ptr.assign(1, static_cast<int>(lu.l_ptr_[t]));
        visited[t] = k;
        while (!dfs_stack.empty()) {
          const int cur = dfs_stack.back();
          int idx = dfs_ptr.back();
          bool descended = false;
          for (; idx < static_cast<int>(lu.l_ptr_[cur + 1]); ++idx) {
            const int rr = lu.l_row_[idx];
            if (stamp[rr] != k) {
              stamp[rr] = k;
              x[rr] = 0.0;
              rowlist.push_back(rr);
            }
            const int tt = pinv[rr];
            if (tt >= 0 && visited[tt] != k) {
              visited[tt] = k;
              dfs_ptr.back() = idx + 1;
              dfs_stack.push_back(tt);
              dfs_ptr.push_back(static_cast<int>(lu.l_ptr_[tt]));
              descended = true;
              break;
            }
          }
          if (!descended) {
            topo.push_back(cur);
            dfs_stack.pop_back();
            dfs_ptr.pop_back();
          }
        }
      }
    }

    // Numeric updates in topological order (reverse postorder).
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      const int t = *it;
      const double xt = x[lu.pivot_row_[t]];
      lu.u_pos_.push_back(t);
      lu.u_val_.push_back(xt);
      if (xt != 0.0) {
        for (long long p = lu.l_ptr_[t]; p < lu.l_ptr_[t + 1]; ++p) {
          x[lu.l_row_[p]] -= lu.l_val_[p] * xt;
          flops += 2;
        }
      }
    }
    // U diag handled below; fix U column pointer after pushing entries.
    lu.u_ptr_[k + 1] = static_cast<long long>(lu.u_pos_.size());

    // Partial pivoting among rows not yet pivoted.
    int piv = -1;
    double pmax = -1.0;
    for (int r : rowlist) {
      if (pinv[r] >= 0) continue;
      const double av = std::abs(x[r]);
      if (av > pmax || (av == pmax && piv >= 0 && r < piv)) {
        pmax = av;
        piv = r;
      }
    }
    if (piv < 0 || pmax <= pivot_floor)
      throw FactorizationError("SparseLU: singular pivot in column " + std::to_string(jcol) +
                               " of " + label);
    const double d = x[piv];
    lu.u_diag_[k] = d;
    lu.pivot_row_[k] = piv;
    pinv[piv] = k;

    for (int r : rowlist) {
      if (pinv[r] >= 0) continue;  // piv already marked
      const double lv = x[r] / d;
      flops += 1;
      lu.l_row_.push_back(r);
      lu.l_val_.push_back(lv);
    }
    lu.l_ptr_[k + 1] = static_cast<long long>(lu.l_row_.size());

    for (int r : rowlist) x[r] = 0.0;
  }

  lu.stats_.factor_flops = flops;
  lu.stats_.nnz_lu = static_cast<long long>(lu.l_row_.size()) +
                     static_cast<long long>(lu.u_pos_.size()) + n;
  lu.stats_.subst_flops = 2 * lu.stats_.nnz_lu;
  lu.stats_.fill_in = lu.stats_.nnz_lu - static_cast<long long>(a.values.size());
  return lu;
}

void SparseLU::solve_inplace(std::vector<double>& b) const {
  if (static_cast<int>(b.size()) != n_) throw ConfigError("SparseLU::solve: size mismatch");
  // Forward solve L y = P b, accumulating in original-row space.
  std::vector<double> y(n_);
  for (int k = 0; k < n_; ++k) {
    const double xk = b[pivot_row_[k]];
    y[k] = xk;
    if (xk != 0.0)
      for (long long p = l_ptr_[k]; p < l_ptr_[k + 1]; ++p) b[l_row_[p]] -= l_val_[p] * xk;
  }
  // Back solve U z = y over pivot positions.
  for (int k = n_ - 1; k >= 0; --k) {
    y[k] /= u_diag_[k];
    const double zk = y[k];
    if (zk != 0.0)
      for (long long p = u_ptr_[k]; p < u_ptr_[k + 1]; ++p) y[u_pos_[p]] -= u_val_[p] * zk;
  }
  // Undo the column permutation.
  for (int k = 0; k < n_; ++k) b[col_of_pos_[k]] = y[k];
}

std::vector<double> SparseLU::solve(const std::vector<double>& rhs) const {
  std::vector<double> x = rhs;
  solve_inplace(x);
  return x;
}

}  // namespace addm
