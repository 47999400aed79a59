#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "addm/costmodel.hpp"
#include "addm/errors.hpp"

using namespace addm;

TEST_CASE("saturating speed curve") {
  // Published triangular-factorization fit: at N = b the curve sits at a/2.
  const double a = 5.5827e10, b = 6.4325e4;
  CHECK(speed_saturating(b, a, b) == doctest::Approx(2.79135e10).epsilon(1e-12));
  CHECK(speed_saturating(1e-9, a, b) <= 1e-3 * a);
  CHECK(speed_saturating(9.0 * b, a, b) == doctest::Approx(0.9 * a).epsilon(1e-12));
  // Strictly below the asymptote for any finite size.
  for (double n : {1.0, 1e3, 1e6, 1e12}) CHECK(speed_saturating(n, a, b) < a);
}

TEST_CASE("affine capped speed curve") {
  CHECK(speed_affine_capped(12345.0, 0.0, 1e9, 2e9) == 1e9);
  CHECK(speed_affine_capped(1e4, 1e5, 0.0, 1e9) == 1e9);
  CHECK(speed_affine_capped(1e4, 1e4, 1e8, 1e10) == doctest::Approx(2e8).epsilon(1e-14));
  for (double n : {1.0, 1e4, 1e8}) CHECK(speed_affine_capped(n, 1e3, 1e6, 5e8) <= 5e8);
}

TEST_CASE("communication time of one call") {
  CHECK(comm_time_one(1e5, 8.0, 1e-5, 1e-9, 2e-5) == doctest::Approx(1.5e-4).epsilon(1e-12));
  CHECK(comm_time_one(777.0, 1.0, 3e-5, 2e-9, 4e-5) ==
        doctest::Approx(2e-9 * 777.0 + 4e-5).epsilon(1e-12));
  // Doubling N doubles the bandwidth term exactly.
  const double t1 = comm_time_one(1e4, 4.0, 0.0, 1e-9, 0.0);
  CHECK(comm_time_one(2e4, 4.0, 0.0, 1e-9, 0.0) == doctest::Approx(2.0 * t1).epsilon(1e-14));
  // Monotone in P for alpha > 0.
  double prev = 0.0;
  for (double p : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double t = comm_time_one(1e4, p, 1e-5, 1e-9, 2e-5);
    CHECK(t >= prev);
    prev = t;
  }
}

TEST_CASE("step_flops: maxima and the mode branch") {
  CHECK(step_flops(1, 0, {5, 3}, {1, 1}, PrecondMode::hybrid) == 5);
  // Ledger convention: entry 0 is the coarse system.
  const std::vector<long long> flass{2, 7, 6};
  CHECK(step_flops(0, 1, {0, 0, 0}, flass, PrecondMode::hybrid) == 9);
  CHECK(step_flops(0, 1, {0, 0, 0}, flass, PrecondMode::additive) == 7);
  CHECK(step_flops(3, 10, {4, 9, 2}, flass, PrecondMode::hybrid) == 3 * 9 + 10 * 9);
  CHECK_THROWS_AS(step_flops(1, 1, {}, {}, PrecondMode::hybrid), ConfigError);
}

TEST_CASE("step_walltime: hand-computed compositions") {
  HardwareProfile p;
  // Flat unit speeds make times equal flop counts.
  p.fac_tri = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};
  p.fac_poly = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};
  p.sub_tri = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};
  p.sub_poly = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};

  SUBCASE("one system") {
    const double t =
        step_walltime(1, 0, {0, 1000}, {0, 1000000000LL}, {0, 0}, p, PrecondMode::hybrid);
    CHECK(t == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("hybrid sums local max and coarse per apply") {
    // T_sub local max 0.002 s, coarse 0.001 s, 10 iterations, no callC.
    const double t = step_walltime(0, 10, {1000, 1000, 1000},
                                   {0, 0, 0}, {1000000, 2000000, 1500000}, p,
                                   PrecondMode::hybrid);
    CHECK(t == doctest::Approx(10.0 * (0.002 + 0.001)).epsilon(1e-12));
  }
  SUBCASE("additive takes the overall max") {
    const double t_add = step_walltime(0, 10, {1000, 1000, 1000},
                                       {0, 0, 0}, {1000000, 2000000, 1500000}, p,
                                       PrecondMode::additive);
    CHECK(t_add == doctest::Approx(10.0 * 0.002).epsilon(1e-12));
    const double t_hyb = step_walltime(0, 10, {1000, 1000, 1000},
                                       {0, 0, 0}, {1000000, 2000000, 1500000}, p,
                                       PrecondMode::hybrid);
    CHECK(t_add <= t_hyb);
  }
}

TEST_CASE("step_comm: per-iteration gather plus broadcast") {
  HardwareProfile p = HardwareProfile::reference();
  CHECK(step_comm(0, 1e5, 1e3, 8, p) == 0.0);
  p.gather = {0.0, 0.0, 1.5e-4};
  p.bcast = {0.0, 0.0, 5e-5};
  CHECK(step_comm(100, 0.0, 0.0, 4, p) == doctest::Approx(0.02).epsilon(1e-12));
  // Monotone in P for alpha > 0.
  p = HardwareProfile::reference();
  double prev = 0.0;
  for (double cores : {1.0, 2.0, 4.0, 8.0}) {
    const double t = step_comm(10, 1e4, 1e3, cores, p);
    CHECK(t > prev);
    prev = t;
  }
}

TEST_CASE("composition law over random task tables") {
  std::mt19937_64 rng(5);
  auto u = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 50; ++trial) {
    const int levels = 1 + static_cast<int>(rng() % 6);
    std::vector<std::vector<double>> tasks(levels);
    std::vector<double> comms(levels);
    double expected = 0.0;
    for (int j = 0; j < levels; ++j) {
      const int ntasks = 1 + static_cast<int>(rng() % 8);
      double mx = 0.0;
      for (int i = 0; i < ntasks; ++i) {
        tasks[j].push_back(u());
        mx = std::max(mx, tasks[j].back());
      }
      comms[j] = 0.1 * u();
      expected += mx + comms[j];
    }
    CHECK(compose_task_levels(tasks, comms) == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("channel separation: coarse systems use the polygonal curves") {
  HardwareProfile p;
  p.fac_tri = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};
  p.fac_poly = {SpeedCurve::Form::affine, 0.0, 1e6, 0.0};  // 1000x slower
  p.sub_tri = {SpeedCurve::Form::affine, 0.0, 1e9, 0.0};
  p.sub_poly = {SpeedCurve::Form::affine, 0.0, 1e6, 0.0};
  SlabLedger lg;
  lg.call_c = 1;
  lg.iter_l = 1;
  lg.num_subdomains = 1;
  lg.sizes = {100, 100};
  lg.fac_flops = {1000000, 1000000};
  lg.sub_flops = {1000000, 1000000};
  lg.mode = PrecondMode::hybrid;
  HardwareProfile nocomm = p;
  nocomm.gather = {0, 0, 0};
  nocomm.bcast = {0, 0, 0};
  auto cost = simulate_parallel_step(lg, nocomm, CostMode::synthetic);
  // Coarse factorization dominates through the slow polygonal channel.
  CHECK(cost.fac_seconds[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cost.fac_seconds[1] == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(cost.wtime == doctest::Approx(1.0 + 1.0 + 1e-3).epsilon(1e-9));
  CHECK(cost.costs == cost.wtime);  // comm disabled
}

TEST_CASE("cost additivity across steps") {
  HardwareProfile p = HardwareProfile::reference();
  SlabLedger lg;
  lg.call_c = 2;
  lg.iter_l = 7;
  lg.num_subdomains = 3;
  lg.sizes = {50, 120, 110, 90};
  lg.fac_flops = {4000, 90000, 80000, 30000};
  lg.sub_flops = {900, 4000, 4200, 3100};
  double sum = 0.0;
  for (int step = 0; step < 5; ++step) {
    auto c = simulate_parallel_step(lg, p, CostMode::synthetic);
    sum += c.costs;
  }
  auto one = simulate_parallel_step(lg, p, CostMode::synthetic);
  CHECK(sum == doctest::Approx(5.0 * one.costs).epsilon(1e-14));
}

TEST_CASE("profile file round-trip") {
  HardwareProfile p = HardwareProfile::reference();
  p.gather = {3.3e-5, 2.2e-9, 1.1e-5};
  const std::string path = "profile_roundtrip.txt";
  p.save(path);
  auto r = HardwareProfile::load(path);
  CHECK(r.fac_tri.a == p.fac_tri.a);
  CHECK(r.fac_tri.b == p.fac_tri.b);
  CHECK(r.sub_poly.a == p.sub_poly.a);
  CHECK(r.gather.alpha == p.gather.alpha);
  CHECK(r.gather.beta == p.gather.beta);
  CHECK(r.bcast.gamma == p.bcast.gamma);
  std::remove(path.c_str());
  CHECK_THROWS_AS(HardwareProfile::load("missing_profile.txt"), ConfigError);
}

TEST_CASE("measured mode requires samples and composes them") {
  SlabLedger lg;
  lg.call_c = 1;
  lg.iter_l = 2;
  lg.num_subdomains = 2;
  lg.sizes = {10, 20, 20};
  lg.fac_flops = {100, 300, 200};
  lg.sub_flops = {50, 80, 70};
  HardwareProfile p = HardwareProfile::reference();
  CHECK_THROWS_AS(simulate_parallel_step(lg, p, CostMode::measured), ConfigError);
  lg.fac_seconds = {1e-5, 3e-5, 2e-5};
  lg.sub_seconds = {1e-6, 2e-6, 3e-6};
  auto c = simulate_parallel_step(lg, p, CostMode::measured);
  CHECK(c.wtime == doctest::Approx(1 * 3e-5 + 2 * (3e-6 + 1e-6)).epsilon(1e-12));
}
