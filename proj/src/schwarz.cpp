#include "addm/schwarz.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "addm/errors.hpp"

namespace addm {

namespace {

double monotonic_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// Fill-reducing column order for a block submatrix: minimum degree on the
// block adjacency of the (sub)matrix, expanded to scalar columns.
std::vector<int> ordered_columns(const BlockSparseMatrix& a, const std::vector<int>& subset) {
  std::vector<int> local(a.num_block_rows(), -1);
  for (std::size_t i = 0; i < subset.size(); ++i) local[subset[i]] = static_cast<int>(i);
  std::vector<std::vector<int>> adj(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) {
    for (const auto& e : a.row_blocks(subset[i])) {
      const int lc = local[e.col];
      if (lc >= 0 && lc != static_cast<int>(i)) {
        adj[i].push_back(lc);
        adj[lc].push_back(static_cast<int>(i));
      }
    }
  }
  std::vector<int> sizes(subset.size());
  for (std::size_t i = 0; i < subset.size(); ++i) sizes[i] = a.block_size(subset[i]);
  return expand_block_order(minimum_degree_order(adj), sizes);
}

struct TimedFactor {
  SparseLU lu;
  double fac_seconds = -1.0;
  double sub_seconds = -1.0;
};

TimedFactor factor_system(const BlockSparseMatrix& a, const std::vector<int>& subset,
                          const std::string& label, bool measure) {
  const auto csc = a.to_csc(subset);
  const auto order = ordered_columns(a, subset);
  TimedFactor out;
  if (!measure) {
    out.lu = SparseLU::factorize(csc, order, label);
    return out;
  }
  std::vector<double> fac_t(3), sub_t(3);
  for (int rep = 0; rep < 3; ++rep) {
    const double t0 = monotonic_seconds();
    out.lu = SparseLU::factorize(csc, order, label);
    fac_t[rep] = monotonic_seconds() - t0;
  }
  std::vector<double> rhs(csc.n, 1.0);
  for (int rep = 0; rep < 3; ++rep) {
    std::vector<double> x = rhs;
    const double t0 = monotonic_seconds();
    out.lu.solve_inplace(x);
    sub_t[rep] = monotonic_seconds() - t0;
  }
  std::sort(fac_t.begin(), fac_t.end());
  std::sort(sub_t.begin(), sub_t.end());
  out.fac_seconds = fac_t[1];
  out.sub_seconds = sub_t[1];
  return out;
}

}  // namespace

TwoLevelPreconditioner::TwoLevelPreconditioner(PrecondMode mode, const STDGSpace& space,
                                               const DecompPlan& plan)
    : mode_(mode), space_(&space), plan_(plan) {
  if (static_cast<int>(plan.subdomain_of.size()) != space.mesh().num_elements())
    throw ConfigError("TwoLevelPreconditioner: plan does not match the space");
  restrictions_.reserve(plan.num_subdomains);
  for (int i = 0; i < plan.num_subdomains; ++i)
    restrictions_.push_back(subdomain_restriction(space, plan, i));
}

void TwoLevelPreconditioner::set_coarse(CoarseRestriction r0) {
  coarse_ = std::move(r0);
  factorized_ = false;
}

const BlockSparseMatrix& TwoLevelPreconditioner::coarse_matrix() const {
  if (!coarse_matrix_) throw StateError("TwoLevelPreconditioner: no coarse matrix");
  return *coarse_matrix_;
}

void TwoLevelPreconditioner::factorize(const BlockSparseMatrix& a, bool measure_timing) {
  if (a.size() != space_->dim())
    throw ConfigError("TwoLevelPreconditioner: matrix size does not match the space");
  a_ = &a;
  local_lu_.clear();
  coarse_lu_.reset();
  coarse_matrix_.reset();
  ledger_.assign(plan_.num_subdomains + 1, SystemCost{});

  const auto subs = plan_.subdomain_elements();
  for (int i = 0; i < plan_.num_subdomains; ++i) {
    auto tf = factor_system(a, subs[i], "subdomain " + std::to_string(i), measure_timing);
    SystemCost& c = ledger_[i + 1];
    c.size = tf.lu.size();
    c.fac_flops = tf.lu.stats().factor_flops;
    c.sub_flops = tf.lu.stats().subst_flops;
    c.fac_seconds = tf.fac_seconds;
    c.sub_seconds = tf.sub_seconds;
    local_lu_.push_back(std::move(tf.lu));
  }

  if (coarse_) {
    coarse_matrix_ = galerkin_coarse(a, *coarse_);
    std::vector<int> all(coarse_matrix_->num_block_rows());
    for (std::size_t c = 0; c < all.size(); ++c) all[c] = static_cast<int>(c);
    auto tf = factor_system(*coarse_matrix_, all, "coarse system", measure_timing);
    SystemCost& c = ledger_[0];
    c.size = tf.lu.size();
    c.fac_flops = tf.lu.stats().factor_flops;
    c.sub_flops = tf.lu.stats().subst_flops;
    c.fac_seconds = tf.fac_seconds;
    c.sub_seconds = tf.sub_seconds;
    coarse_lu_ = std::move(tf.lu);
  }
  factorized_ = true;
}

std::vector<double> TwoLevelPreconditioner::apply(const std::vector<double>& x) const {
  return mode_ == PrecondMode::additive ? apply_additive(x) : apply_hybrid(x);
}

std::vector<double> TwoLevelPreconditioner::apply_additive(const std::vector<double>& x) const {
  if (!factorized_) throw StateError("apply_additive: preconditioner not factorized");
  std::vector<double> u(x.size(), 0.0);
  std::vector<double> xi;
  for (int i = 0; i < plan_.num_subdomains; ++i) {
    xi.resize(restrictions_[i].local_dim());
    restrictions_[i].apply(x.data(), xi.data());
    local_lu_[i].solve_inplace(xi);
    restrictions_[i].apply_transpose_add(xi.data(), u.data());
  }
  if (coarse_) {
    std::vector<double> x0 = coarse_->apply(x);
    coarse_lu_->solve_inplace(x0);
    std::vector<double> back = coarse_->apply_transpose(x0);
    for (std::size_t l = 0; l < u.size(); ++l) u[l] += back[l];
  }
  ++apply_count_;
  return u;
}

std::vector<double> TwoLevelPreconditioner::apply_hybrid(const std::vector<double>& x) const {
  if (!factorized_) throw StateError("apply_hybrid: preconditioner not factorized");
  std::vector<double> y(x.size(), 0.0);
  std::vector<double> xi;
  for (int i = 0; i < plan_.num_subdomains; ++i) {
    xi.resize(restrictions_[i].local_dim());
    restrictions_[i].apply(x.data(), xi.data());
    local_lu_[i].solve_inplace(xi);
    restrictions_[i].apply_transpose_add(xi.data(), y.data());
  }
  if (!coarse_) {
    ++apply_count_;
    return y;
  }
  std::vector<double> z(x.size());
  a_->matvec(y.data(), z.data());
  for (std::size_t l = 0; l < z.size(); ++l) z[l] = x[l] - z[l];
  std::vector<double> z0 = coarse_->apply(z);
  coarse_lu_->solve_inplace(z0);
  std::vector<double> u = coarse_->apply_transpose(z0);
  for (std::size_t l = 0; l < u.size(); ++l) u[l] += y[l];
  ++apply_count_;
  return u;
}

long long TwoLevelPreconditioner::fac_flops_max() const {
  long long m = 0;
  for (const auto& c : ledger_) m = std::max(m, c.fac_flops);
  return m;
}

long long TwoLevelPreconditioner::apply_subst_flops() const {
  long long local_max = 0;
  for (std::size_t i = 1; i < ledger_.size(); ++i) local_max = std::max(local_max, ledger_[i].sub_flops);
  if (mode_ == PrecondMode::additive) return std::max(local_max, ledger_[0].sub_flops);
  return local_max + ledger_[0].sub_flops;
}

long long TwoLevelPreconditioner::max_local_size() const {
  long long m = 0;
  for (std::size_t i = 1; i < ledger_.size(); ++i) m = std::max(m, ledger_[i].size);
  return m;
}

GmresResult gmres(const BlockSparseMatrix& a, const TwoLevelPreconditioner* precond,
                  const std::vector<double>& rhs, double reduction, int max_iter) {
  if (!(reduction > 0.0 && reduction < 1.0))
    throw ConfigError("gmres: reduction factor must lie in (0,1)");
  const long long n = a.size();
  if (static_cast<long long>(rhs.size()) != n) throw ConfigError("gmres: rhs size mismatch");

  auto precondition = [&](const std::vector<double>& v) {
    return precond ? precond->apply(v) : v;
  };
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
  };

  GmresResult out;
  std::vector<double> r0 = precondition(rhs);
  const double beta = norm2(r0);
  out.history.push_back(beta);
  out.x.assign(n, 0.0);
  if (beta == 0.0) {
    out.converged = true;
    return out;
  }
  const double target = reduction * beta;

  std::vector<std::vector<double>> basis;
  basis.reserve(16);
  for (double& v : r0) v /= beta;
  basis.push_back(std::move(r0));

  std::vector<std::vector<double>> hcols;
  std::vector<double> cs, sn;
  std::vector<double> g{beta};

  int k = 0;
  bool breakdown = false;
  while (k < max_iter) {
    std::vector<double> w(n);
    a.matvec(basis[k].data(), w.data());
    w = precondition(w);

    std::vector<double> h(k + 2, 0.0);
    for (int i = 0; i <= k; ++i) {
      double dot = 0.0;
      for (long long l = 0; l < n; ++l) dot += w[l] * basis[i][l];
      h[i] = dot;
      for (long long l = 0; l < n; ++l) w[l] -= dot * basis[i][l];
    }
    const double wnorm = norm2(w);
    h[k + 1] = wnorm;

    // Apply accumulated Givens rotations, then form the new one.
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h[i] + sn[i] * h[i + 1];
      h[i + 1] = -sn[i] * h[i] + cs[i] * h[i + 1];
      h[i] = t;
    }
    const double denom = std::hypot(h[k], h[k + 1]);
    const double c = denom > 0.0 ? h[k] / denom : 1.0;
    const double s = denom > 0.0 ? h[k + 1] / denom : 0.0;
    cs.push_back(c);
    sn.push_back(s);
    h[k] = denom;
    h[k + 1] = 0.0;
    const double gk = g[k];
    g[k] = c * gk;
    g.push_back(-s * gk);

    hcols.push_back(std::move(h));
    const double res = std::abs(g[k + 1]);
    out.history.push_back(res);
    ++k;

    if (res <= target) {
      out.converged = true;
      break;
    }
    if (wnorm <= 1e-14 * beta) {  // invariant subspace reached
      breakdown = true;
      break;
    }
    for (double& v : w) v /= wnorm;
    basis.push_back(std::move(w));
  }
  out.iterations = k;

  if (!out.converged && !breakdown && k >= max_iter)
    throw ConvergenceError("gmres: no convergence within " + std::to_string(max_iter) +
                               " iterations",
                           out.history);
  if (breakdown && !out.converged)
    throw ConvergenceError("gmres: breakdown before reaching the tolerance", out.history);

  // Solve the small triangular system and expand the solution.
  std::vector<double> y(k);
  for (int i = k - 1; i >= 0; --i) {
    double s = g[i];
    for (int j = i + 1; j < k; ++j) s -= hcols[j][i] * y[j];
    y[i] = s / hcols[i][i];
  }
  for (int j = 0; j < k; ++j)
    for (long long l = 0; l < n; ++l) out.x[l] += y[j] * basis[j][l];
  return out;
}

}  // namespace addm
