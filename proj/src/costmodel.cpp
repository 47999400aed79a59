#include "addm/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "addm/errors.hpp"

namespace addm {

double speed_saturating(double n, double a, double b) { return a * n / (b + n); }

double speed_affine_capped(double n, double a, double b, double smax) {
  return std::min(smax, a * n + b);
}

double comm_time_one(double n, double p, double alpha, double beta, double gamma) {
  return alpha * std::log2(p) + beta * n + gamma;
}

double SpeedCurve::value(double n) const {
  double s = form == Form::saturating ? speed_saturating(n, a, b) : a * n + b;
  if (smax > 0.0) s = std::min(s, smax);
  return s;
}

HardwareProfile HardwareProfile::reference() {
  HardwareProfile p;
  p.fac_tri = {SpeedCurve::Form::saturating, 5.5827e10, 6.4325e4, 0.0};
  p.fac_poly = {SpeedCurve::Form::saturating, 4.7066e10, 2.1832e4, 0.0};
  p.sub_tri = {SpeedCurve::Form::saturating, 1.1884e9, 6.7913e3, 0.0};
  p.sub_poly = {SpeedCurve::Form::saturating, 1.1009e9, 3.7104e3, 0.0};
  p.gather = {1.0e-5, 1.0e-9, 2.0e-5};
  p.bcast = {5.0e-6, 5.0e-10, 1.0e-5};
  return p;
}

namespace {

const char* form_name(SpeedCurve::Form f) {
  return f == SpeedCurve::Form::saturating ? "saturating" : "affine";
}

}  // namespace

void HardwareProfile::save(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("HardwareProfile::save: cannot open " + path);
  char buf[128];
  auto kv = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, "%s = %.17g\n", key, v);
    f << buf;
  };
  f << "curve = " << form_name(fac_tri.form) << '\n';
  kv("a_fac_tri", fac_tri.a);
  kv("b_fac_tri", fac_tri.b);
  kv("a_fac_poly", fac_poly.a);
  kv("b_fac_poly", fac_poly.b);
  kv("a_sub_tri", sub_tri.a);
  kv("b_sub_tri", sub_tri.b);
  kv("a_sub_poly", sub_poly.a);
  kv("b_sub_poly", sub_poly.b);
  kv("smax_fac", fac_tri.smax);
  kv("smax_sub", sub_tri.smax);
  kv("alpha_g", gather.alpha);
  kv("beta_g", gather.beta);
  kv("gamma_g", gather.gamma);
  kv("alpha_b", bcast.alpha);
  kv("beta_b", bcast.beta);
  kv("gamma_b", bcast.gamma);
}

HardwareProfile HardwareProfile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("HardwareProfile::load: cannot open " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto num = [&](const std::string& key, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    try {
      return std::stod(it->second);
    } catch (const std::exception&) {
      throw ConfigError("HardwareProfile::load: bad value for " + key);
    }
  };
  HardwareProfile p = reference();
  SpeedCurve::Form form = SpeedCurve::Form::saturating;
  if (auto it = kv.find("curve"); it != kv.end()) {
    if (it->second == "affine") form = SpeedCurve::Form::affine;
    else if (it->second != "saturating")
      throw ConfigError("HardwareProfile::load: curve must be saturating or affine");
  }
  p.fac_tri = {form, num("a_fac_tri", p.fac_tri.a), num("b_fac_tri", p.fac_tri.b), 0.0};
  p.fac_poly = {form, num("a_fac_poly", p.fac_poly.a), num("b_fac_poly", p.fac_poly.b), 0.0};
  p.sub_tri = {form, num("a_sub_tri", p.sub_tri.a), num("b_sub_tri", p.sub_tri.b), 0.0};
  p.sub_poly = {form, num("a_sub_poly", p.sub_poly.a), num("b_sub_poly", p.sub_poly.b), 0.0};
  const double smax_fac = num("smax_fac", 0.0);
  const double smax_sub = num("smax_sub", 0.0);
  p.fac_tri.smax = p.fac_poly.smax = smax_fac;
  p.sub_tri.smax = p.sub_poly.smax = smax_sub;
  p.gather = {num("alpha_g", p.gather.alpha), num("beta_g", p.gather.beta),
              num("gamma_g", p.gather.gamma)};
  p.bcast = {num("alpha_b", p.bcast.alpha), num("beta_b", p.bcast.beta),
             num("gamma_b", p.bcast.gamma)};
  return p;
}

long long step_flops(long long call_c, long long iter_l, const std::vector<long long>& fac_flops,
                     const std::vector<long long>& sub_flops, PrecondMode mode) {
  if (fac_flops.empty() || sub_flops.empty())
    throw ConfigError("step_flops: empty flop lists");
  long long ff_fac = 0;
  for (long long v : fac_flops) ff_fac = std::max(ff_fac, v);
  long long local_max = 0;
  for (std::size_t i = 1; i < sub_flops.size(); ++i) local_max = std::max(local_max, sub_flops[i]);
  const long long ff_ass =
      mode == PrecondMode::additive ? std::max(local_max, sub_flops[0]) : local_max + sub_flops[0];
  return call_c * ff_fac + iter_l * ff_ass;
}

namespace {

double time_for(long long flops, long long size, const SpeedCurve& curve) {
  if (flops <= 0 || size <= 0) return 0.0;
  return static_cast<double>(flops) / curve.value(static_cast<double>(size));
}

}  // namespace

double step_walltime(long long call_c, long long iter_l, const std::vector<long long>& sizes,
                     const std::vector<long long>& fac_flops,
                     const std::vector<long long>& sub_flops, const HardwareProfile& profile,
                     PrecondMode mode) {
  if (sizes.empty() || sizes.size() != fac_flops.size() || sizes.size() != sub_flops.size())
    throw ConfigError("step_walltime: inconsistent ledger lists");
  double fac_max = time_for(fac_flops[0], sizes[0], profile.fac_poly);
  double sub_coarse = time_for(sub_flops[0], sizes[0], profile.sub_poly);
  double sub_local_max = 0.0;
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    fac_max = std::max(fac_max, time_for(fac_flops[i], sizes[i], profile.fac_tri));
    sub_local_max = std::max(sub_local_max, time_for(sub_flops[i], sizes[i], profile.sub_tri));
  }
  const double per_apply = mode == PrecondMode::additive ? std::max(sub_local_max, sub_coarse)
                                                         : sub_local_max + sub_coarse;
  return call_c * fac_max + iter_l * per_apply;
}

double step_comm(long long iter_l, double n_gather, double n_bcast, double cores,
                 const HardwareProfile& profile) {
  if (cores < 1.0) throw ConfigError("step_comm: cores >= 1 required");
  return iter_l * (profile.gather.time(n_gather, cores) + profile.bcast.time(n_bcast, cores));
}

double compose_task_levels(const std::vector<std::vector<double>>& level_times,
                           const std::vector<double>& comm_times) {
  if (level_times.size() != comm_times.size())
    throw ConfigError("compose_task_levels: level/comm size mismatch");
  double total = 0.0;
  for (std::size_t j = 0; j < level_times.size(); ++j) {
    double m = 0.0;
    for (double t : level_times[j]) m = std::max(m, t);
    total += m + comm_times[j];
  }
  return total;
}

SlabLedger SlabLedger::from_preconditioner(const TwoLevelPreconditioner& precond, long long call_c,
                                           long long iter_l) {
  SlabLedger l;
  l.call_c = call_c;
  l.iter_l = iter_l;
  l.num_subdomains = precond.num_subdomains();
  l.mode = precond.mode();
  for (const auto& c : precond.ledger()) {
    l.sizes.push_back(c.size);
    l.fac_flops.push_back(c.fac_flops);
    l.sub_flops.push_back(c.sub_flops);
    l.fac_seconds.push_back(c.fac_seconds);
    l.sub_seconds.push_back(c.sub_seconds);
  }
  return l;
}

StepCost simulate_parallel_step(const SlabLedger& ledger, const HardwareProfile& profile,
                                CostMode mode) {
  if (ledger.sizes.empty()) throw ConfigError("simulate_parallel_step: empty ledger");
  StepCost out;
  out.flops = step_flops(ledger.call_c, ledger.iter_l, ledger.fac_flops, ledger.sub_flops,
                         ledger.mode);

  const std::size_t nsys = ledger.sizes.size();
  out.fac_seconds.resize(nsys);
  out.sub_seconds.resize(nsys);
  for (std::size_t i = 0; i < nsys; ++i) {
    if (mode == CostMode::measured) {
      if (ledger.fac_seconds.size() != nsys || ledger.fac_seconds[i] < 0.0)
        throw ConfigError("simulate_parallel_step: measured mode needs timing samples");
      out.fac_seconds[i] = ledger.sizes[i] > 0 ? ledger.fac_seconds[i] : 0.0;
      out.sub_seconds[i] = ledger.sizes[i] > 0 ? ledger.sub_seconds[i] : 0.0;
    } else {
      const SpeedCurve& fac = i == 0 ? profile.fac_poly : profile.fac_tri;
      const SpeedCurve& sub = i == 0 ? profile.sub_poly : profile.sub_tri;
      out.fac_seconds[i] = time_for(ledger.fac_flops[i], ledger.sizes[i], fac);
      out.sub_seconds[i] = time_for(ledger.sub_flops[i], ledger.sizes[i], sub);
    }
  }

  double fac_max = 0.0, sub_local_max = 0.0;
  for (std::size_t i = 0; i < nsys; ++i) fac_max = std::max(fac_max, out.fac_seconds[i]);
  for (std::size_t i = 1; i < nsys; ++i) sub_local_max = std::max(sub_local_max, out.sub_seconds[i]);
  const double per_apply = ledger.mode == PrecondMode::additive
                               ? std::max(sub_local_max, out.sub_seconds[0])
                               : sub_local_max + out.sub_seconds[0];
  out.wtime = ledger.call_c * fac_max + ledger.iter_l * per_apply;

  long long n1 = 0;
  for (std::size_t i = 1; i < nsys; ++i) n1 = std::max(n1, ledger.sizes[i]);
  out.tcomm = step_comm(ledger.iter_l, static_cast<double>(n1),
                        static_cast<double>(ledger.sizes[0]),
                        static_cast<double>(std::max(1, ledger.num_subdomains)), profile);
  out.costs = out.wtime + out.tcomm;
  return out;
}

}  // namespace addm
