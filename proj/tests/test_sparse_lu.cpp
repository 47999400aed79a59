#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "addm/errors.hpp"
#include "addm/sparse_lu.hpp"

using namespace addm;

namespace {

// Scalar blocks: a plain sparse matrix as a BlockSparseMatrix with 1x1 blocks.
BlockSparseMatrix scalar_matrix(int n) { return BlockSparseMatrix(std::vector<int>(n, 1)); }

std::vector<int> natural_order(int n) {
  std::vector<int> o(n);
  for (int i = 0; i < n; ++i) o[i] = i;
  return o;
}

}  // namespace

TEST_CASE("identity: zero elimination flops, substitution 2N") {
  const int n = 17;
  auto a = scalar_matrix(n);
  for (int i = 0; i < n; ++i) a.block(i, i)(0, 0) = 1.0;
  auto lu = SparseLU::factorize(a.to_csc(), natural_order(n));
  CHECK(lu.stats().factor_flops == 0);
  CHECK(lu.stats().subst_flops == 2 * n);
  CHECK(lu.stats().nnz_lu == n);
  std::vector<double> b(n, 3.0);
  auto x = lu.solve(b);
  for (double v : x) CHECK(v == 3.0);
}

TEST_CASE("tridiagonal: hand-counted factorization and substitution flops") {
  const int n = 12;
  auto a = scalar_matrix(n);
  for (int i = 0; i < n; ++i) {
    a.block(i, i)(0, 0) = 4.0;  // diagonally dominant: no row swaps
    if (i > 0) a.block(i, i - 1)(0, 0) = -1.0;
    if (i + 1 < n) a.block(i, i + 1)(0, 0) = -1.0;
  }
  auto lu = SparseLU::factorize(a.to_csc(), natural_order(n));
  // Per column after the first: one multiply-add (2) and one division (1)
  // for the single subdiagonal entry; the last column has no division.
  CHECK(lu.stats().factor_flops == 3 * (n - 1));
  CHECK(lu.stats().nnz_lu == 3 * n - 2);
  CHECK(lu.stats().subst_flops == 2 * (3 * n - 2));

  std::vector<double> xref(n);
  for (int i = 0; i < n; ++i) xref[i] = std::sin(1.0 + i);
  std::vector<double> b(n, 0.0);
  for (int i = 0; i < n; ++i) {
    b[i] = 4.0 * xref[i];
    if (i > 0) b[i] -= xref[i - 1];
    if (i + 1 < n) b[i] -= xref[i + 1];
  }
  auto x = lu.solve(b);
  for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xref[i]).epsilon(1e-13));
}

TEST_CASE("random sparse systems solve against a dense oracle") {
  std::mt19937_64 rng(5);
  auto urand = [&]() { return 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0; };
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 40 + 13 * trial;
    auto a = scalar_matrix(n);
    Mat dense(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i == j || (rng() % 5) == 0) {
          const double v = (i == j) ? 6.0 + urand() : urand();
          a.block(i, j)(0, 0) = v;
          dense(i, j) = v;
        }
      }
    }
    std::vector<double> b(n);
    for (double& v : b) v = urand();
    // Use a shuffled column order to exercise the permутation handling.
    std::vector<int> order = natural_order(n);
    std::shuffle(order.begin(), order.end(), rng);
    auto lu = SparseLU::factorize(a.to_csc(), order);
    auto x = lu.solve(b);
    auto xd = dense_solve(dense, b);
    for (int i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("singular matrices raise a factorization error naming the system") {
  const int n = 4;
  auto a = scalar_matrix(n);
  a.block(0, 0)(0, 0) = 1.0;
  a.block(1, 1)(0, 0) = 1.0;
  a.block(2, 3)(0, 0) = 1.0;  // row/col 2 structurally empty in column 2
  a.block(3, 2)(0, 0) = 0.0;  // explicit zero: numerically singular column
  a.block(3, 3)(0, 0) = 1.0;
  CHECK_THROWS_WITH_AS(SparseLU::factorize(a.to_csc(), natural_order(n), "local block 7"),
                       doctest::Contains("local block 7"), FactorizationError);
}

TEST_CASE("flop counters are deterministic") {
  std::mt19937_64 rng(11);
  const int n = 60;
  auto a = scalar_matrix(n);
  for (int i = 0; i < n; ++i) {
    a.block(i, i)(0, 0) = 5.0;
    for (int t = 0; t < 3; ++t) {
      const int j = static_cast<int>(rng() % n);
      if (j != i) a.block(i, j)(0, 0) = 1.0 + 0.001 * j;
    }
  }
  auto order = natural_order(n);
  auto lu1 = SparseLU::factorize(a.to_csc(), order);
  auto lu2 = SparseLU::factorize(a.to_csc(), order);
  CHECK(lu1.stats().factor_flops == lu2.stats().factor_flops);
  CHECK(lu1.stats().subst_flops == lu2.stats().subst_flops);
  CHECK(lu1.stats().nnz_lu == lu2.stats().nnz_lu);
}

TEST_CASE("substitution flops equal twice nnz(L+U) by construction") {
  std::mt19937_64 rng(23);
  const int n = 50;
  auto a = scalar_matrix(n);
  for (int i = 0; i < n; ++i) {
    a.block(i, i)(0, 0) = 4.0;
    const int j = static_cast<int>(rng() % n);
    if (j != i) {
      a.block(i, j)(0, 0) = 1.0;
      a.block(j, i)(0, 0) = -1.0;
    }
  }
  auto lu = SparseLU::factorize(a.to_csc(), natural_order(n));
  CHECK(lu.stats().subst_flops == 2 * lu.stats().nnz_lu);
  CHECK(lu.stats().fill_in >= 0);
}

TEST_CASE("minimum degree ordering reduces fill on a grid graph") {
  // 2D grid graph: natural order causes heavy fill, minimum degree less.
  const int g = 12;
  const int n = g * g;
  std::vector<std::vector<int>> adj(n);
  auto id = [g](int i, int j) { return i * g + j; };
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      if (i + 1 < g) {
        adj[id(i, j)].push_back(id(i + 1, j));
        adj[id(i + 1, j)].push_back(id(i, j));
      }
      if (j + 1 < g) {
        adj[id(i, j)].push_back(id(i, j + 1));
        adj[id(i, j + 1)].push_back(id(i, j));
      }
    }
  auto order = minimum_degree_order(adj);
  // A permutation of 0..n-1.
  std::vector<char> seen(n, 0);
  for (int v : order) {
    CHECK(!seen[v]);
    seen[v] = 1;
  }

  auto a = scalar_matrix(n);
  for (int v = 0; v < n; ++v) {
    a.block(v, v)(0, 0) = 5.0;
    for (int u : adj[v]) a.block(v, u)(0, 0) = -1.0;
  }
  auto lu_md = SparseLU::factorize(a.to_csc(), order);
  auto lu_nat = SparseLU::factorize(a.to_csc(), natural_order(n));
  CHECK(lu_md.stats().nnz_lu < lu_nat.stats().nnz_lu);
  CHECK(lu_md.stats().factor_flops < lu_nat.stats().factor_flops);
}

TEST_CASE("expand_block_order maps block permutations to scalar columns") {
  const std::vector<int> sizes{2, 3, 1};
  const std::vector<int> order{2, 0, 1};
  const auto cols = expand_block_order(order, sizes);
  CHECK(cols == std::vector<int>{5, 0, 1, 2, 3, 4});
}
