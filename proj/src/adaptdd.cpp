#include "addm/adaptdd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "addm/dense.hpp"
#include "addm/errors.hpp"

namespace addm {

void HistoryRecord::validate() const {
  if (nh < 1 || nh1 < 1 || nh0 < 1) throw ConfigError("HistoryRecord: sizes must be >= 1");
  if (fac_flops0 < 0 || fac_flops1 < 0 || sub_flops0 < 0 || sub_flops1 < 0 || call_c < 0 ||
      iter_l < 0)
    throw ConfigError("HistoryRecord: counters must be nonnegative");
  if (num_subdomains < 1) throw ConfigError("HistoryRecord: M >= 1 required");
}

void History::record(std::uint64_t mesh_tag, const HistoryRecord& rec) {
  rec.validate();
  if (!tags_.empty() && tags_.back() == mesh_tag) {
    records_.back() = rec;  // same mesh: keep only the last step on it
    return;
  }
  tags_.push_back(mesh_tag);
  records_.push_back(rec);
}

namespace {
constexpr const char* kHistoryHeader =
    "nh,nh1,nh0,fac_flops0,fac_flops1,sub_flops0,sub_flops1,fac_speed0,fac_speed1,sub_speed0,"
    "sub_speed1,call_c,iter_l,m,gather_one,bcast_one,mesh_tag";
}

void History::save_csv(const std::string& path) const {
  std::ofstream f(path);
  if (!f) throw ConfigError("History::save_csv: cannot open " + path);
  f << kHistoryHeader << '\n';
  char buf[512];
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const HistoryRecord& r = records_[i];
    std::snprintf(buf, sizeof buf,
                  "%lld,%lld,%lld,%lld,%lld,%lld,%lld,%.17g,%.17g,%.17g,%.17g,%lld,%lld,%d,%.17g,"
                  "%.17g,%llu\n",
                  r.nh, r.nh1, r.nh0, r.fac_flops0, r.fac_flops1, r.sub_flops0, r.sub_flops1,
                  r.fac_speed0, r.fac_speed1, r.sub_speed0, r.sub_speed1, r.call_c, r.iter_l,
                  r.num_subdomains, r.gather_one, r.bcast_one,
                  static_cast<unsigned long long>(tags_[i]));
    f << buf;
  }
}

History History::load_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("History::load_csv: cannot open " + path);
  std::string line;
  if (!std::getline(f, line) || line.find("nh,") != 0)
    throw ConfigError("History::load_csv: missing header in " + path);
  History h;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    HistoryRecord r;
    unsigned long long tag = 0;
    if (!(ss >> r.nh >> r.nh1 >> r.nh0 >> r.fac_flops0 >> r.fac_flops1 >> r.sub_flops0 >>
          r.sub_flops1 >> r.fac_speed0 >> r.fac_speed1 >> r.sub_speed0 >> r.sub_speed1 >>
          r.call_c >> r.iter_l >> r.num_subdomains >> r.gather_one >> r.bcast_one >> tag))
      throw ConfigError("History::load_csv: malformed row in " + path);
    h.tags_.push_back(tag);
    h.records_.push_back(r);
  }
  return h;
}

double PowerLaw::operator()(double n) const { return c * std::pow(n, mu); }

double AffineSpeed::operator()(double n) const {
  double v = std::min(smax, a * n + b);
  // Prediction guard: an extrapolated affine speed must stay positive.
  const double floor = 1e-6 * (smax > 0.0 ? smax : 1.0);
  return std::max(v, floor);
}

PowerLaw fit_powerlaw(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw ConfigError("fit_powerlaw: need at least 2 samples");
  std::set<double> distinct;
  for (const auto& [n, v] : samples) {
    if (!(n > 0.0) || !(v > 0.0))
      throw ConfigError("fit_powerlaw: samples must be strictly positive");
    distinct.insert(n);
  }
  if (distinct.size() < 2) throw ConfigError("fit_powerlaw: need at least 2 distinct sizes");
  Mat x(static_cast<int>(samples.size()), 2);
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x(static_cast<int>(i), 0) = std::log(samples[i].first);
    x(static_cast<int>(i), 1) = 1.0;
    y[i] = std::log(samples[i].second);
  }
  const auto coef = least_squares(x, y);
  return {std::exp(coef[1]), coef[0]};
}

AffineSpeed fit_speed_affine(const std::vector<std::pair<double, double>>& samples, double smax) {
  if (samples.size() < 2) throw ConfigError("fit_speed_affine: need at least 2 samples");
  std::set<double> distinct;
  for (const auto& s : samples) distinct.insert(s.first);
  AffineSpeed out;
  out.smax = smax;
  if (distinct.size() < 2) {
    double mean = 0.0;
    for (const auto& s : samples) mean += s.second;
    out.a = 0.0;
    out.b = mean / samples.size();
    out.degenerate = true;
    return out;
  }
  Mat x(static_cast<int>(samples.size()), 2);
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x(static_cast<int>(i), 0) = samples[i].first;
    x(static_cast<int>(i), 1) = 1.0;
    y[i] = samples[i].second;
  }
  const auto coef = least_squares(x, y);
  out.a = coef[0];
  out.b = coef[1];
  return out;
}

CommParams fit_comm(const std::vector<std::array<double, 3>>& samples) {
  if (samples.size() < 3) throw ConfigError("fit_comm: need at least 3 samples");
  std::set<double> dp, dn;
  for (const auto& s : samples) {
    dp.insert(s[0]);
    dn.insert(s[1]);
  }
  if (dp.size() < 2)
    throw ConfigError("fit_comm: rank-deficient design, need >= 2 distinct core counts P");
  if (dn.size() < 2)
    throw ConfigError("fit_comm: rank-deficient design, need >= 2 distinct vector lengths N");
  Mat x(static_cast<int>(samples.size()), 3);
  std::vector<double> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    x(static_cast<int>(i), 0) = std::log2(samples[i][0]);
    x(static_cast<int>(i), 1) = samples[i][1];
    x(static_cast<int>(i), 2) = 1.0;
    y[i] = samples[i][2];
  }
  const auto coef = least_squares(x, y);
  return {coef[0], coef[1], coef[2]};
}

std::pair<double, double> running_averages(const History& history, int mlev) {
  if (history.empty()) throw ConfigError("running_averages: empty history");
  if (mlev < 1) throw ConfigError("running_averages: mlev >= 1 required");
  const auto& recs = history.records();
  const std::size_t take = std::min<std::size_t>(mlev, recs.size());
  double cc = 0.0, il = 0.0;
  for (std::size_t i = recs.size() - take; i < recs.size(); ++i) {
    cc += static_cast<double>(recs[i].call_c);
    il += static_cast<double>(recs[i].iter_l);
  }
  return {cc / take, il / take};
}

std::vector<std::pair<int, int>> enumerate_candidates(long long num_elements, int core_budget,
                                                      int n_min) {
  if (n_min < 1) throw ConfigError("enumerate_candidates: n_min >= 1 required");
  if (num_elements < 1) throw ConfigError("enumerate_candidates: empty mesh");
  long long m_max = std::min<long long>(core_budget, num_elements / n_min);
  m_max = std::max<long long>(1, std::min<long long>(m_max, num_elements));
  std::vector<std::pair<int, int>> out;
  for (long long m = 1; m <= m_max; ++m) {
    const long long s_max = std::max<long long>(1, num_elements / (m * m));
    for (long long s = 1; s <= s_max; ++s)
      out.emplace_back(static_cast<int>(m), static_cast<int>(s));
  }
  return out;
}

CostPrediction predict_cost(const FittedModels& models, double nh, long long num_elements, int m,
                            int s, PrecondMode mode) {
  if (m < 1 || s < 1) throw ConfigError("predict_cost: M, s >= 1 required");
  const double n1 = nh / m;
  const double n0 = nh * static_cast<double>(s) * m / static_cast<double>(num_elements);

  const double fac0 = models.fac_flops[0](n0) / models.fac_speed[0](n0);
  const double fac1 = models.fac_flops[1](n1) / models.fac_speed[1](n1);
  const double sub0 = models.sub_flops[0](n0) / models.sub_speed[0](n0);
  const double sub1 = models.sub_flops[1](n1) / models.sub_speed[1](n1);

  CostPrediction out;
  const double per_apply = mode == PrecondMode::additive ? std::max(sub0, sub1) : sub0 + sub1;
  out.compute = models.call_c_avg * std::max(fac0, fac1) + models.iter_l_avg * per_apply;
  out.comm = models.iter_l_avg * (models.gather.time(n1, m) + models.bcast.time(n0, m));
  out.total = out.compute + out.comm;
  return out;
}

std::pair<int, int> choose(const FittedModels& models, double nh, long long num_elements,
                           const std::vector<std::pair<int, int>>& candidates, PrecondMode mode) {
  if (candidates.empty()) throw ConfigError("choose: empty candidate list");
  std::pair<int, int> best = candidates.front();
  double best_cost = predict_cost(models, nh, num_elements, best.first, best.second, mode).total;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    const auto [m, s] = candidates[i];
    const double cost = predict_cost(models, nh, num_elements, m, s, mode).total;
    if (cost < best_cost ||
        (cost == best_cost && std::make_pair(m, s) < best)) {
      best_cost = cost;
      best = {m, s};
    }
  }
  return best;
}

std::pair<int, int> bootstrap_choice(double nh, long long num_elements, double kappa) {
  if (!(kappa >= 1.0)) throw ConfigError("bootstrap_choice: kappa >= 1 required");
  const long long m = std::max<long long>(1, std::llround(nh / kappa));
  const long long s = std::max<long long>(1, num_elements / (2 * m * m));
  return {static_cast<int>(m), static_cast<int>(s)};
}

namespace {

bool powerlaw_feasible(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) return false;
  std::set<double> distinct;
  for (const auto& [n, v] : samples) {
    if (!(n > 0.0) || !(v > 0.0)) return false;
    distinct.insert(n);
  }
  return distinct.size() >= 2;
}

std::vector<std::pair<double, double>> gather_samples(const History& h, int mlev,
                                                      long long HistoryRecord::*size,
                                                      long long HistoryRecord::*value) {
  const auto& recs = h.records();
  const std::size_t take = std::min<std::size_t>(mlev, recs.size());
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = recs.size() - take; i < recs.size(); ++i)
    out.emplace_back(static_cast<double>(recs[i].*size), static_cast<double>(recs[i].*value));
  return out;
}

}  // namespace

bool fits_ready(const History& history) {
  if (history.size() < 2) return false;
  const int mlev = 5;
  return powerlaw_feasible(gather_samples(history, mlev, &HistoryRecord::nh0,
                                          &HistoryRecord::fac_flops0)) &&
         powerlaw_feasible(gather_samples(history, mlev, &HistoryRecord::nh1,
                                          &HistoryRecord::fac_flops1)) &&
         powerlaw_feasible(gather_samples(history, mlev, &HistoryRecord::nh0,
                                          &HistoryRecord::sub_flops0)) &&
         powerlaw_feasible(gather_samples(history, mlev, &HistoryRecord::nh1,
                                          &HistoryRecord::sub_flops1));
}

FittedModels fit_models(const History& history, int mlev) {
  if (!fits_ready(history)) throw ConfigError("fit_models: history cannot support the flop fits");
  const auto& recs = history.records();
  FittedModels out;

  out.fac_flops[0] = fit_powerlaw(
      gather_samples(history, mlev, &HistoryRecord::nh0, &HistoryRecord::fac_flops0));
  out.fac_flops[1] = fit_powerlaw(
      gather_samples(history, mlev, &HistoryRecord::nh1, &HistoryRecord::fac_flops1));
  out.sub_flops[0] = fit_powerlaw(
      gather_samples(history, mlev, &HistoryRecord::nh0, &HistoryRecord::sub_flops0));
  out.sub_flops[1] = fit_powerlaw(
      gather_samples(history, mlev, &HistoryRecord::nh1, &HistoryRecord::sub_flops1));

  double smax_fac = 0.0, smax_sub = 0.0;
  for (const auto& r : recs) {
    smax_fac = std::max({smax_fac, r.fac_speed0, r.fac_speed1});
    smax_sub = std::max({smax_sub, r.sub_speed0, r.sub_speed1});
  }
  std::vector<std::pair<double, double>> sp0, sp1, sa0, sa1;
  for (const auto& r : recs) {
    sp0.emplace_back(static_cast<double>(r.nh0), r.fac_speed0);
    sp1.emplace_back(static_cast<double>(r.nh1), r.fac_speed1);
    sa0.emplace_back(static_cast<double>(r.nh0), r.sub_speed0);
    sa1.emplace_back(static_cast<double>(r.nh1), r.sub_speed1);
  }
  out.fac_speed[0] = fit_speed_affine(sp0, smax_fac);
  out.fac_speed[1] = fit_speed_affine(sp1, smax_fac);
  out.sub_speed[0] = fit_speed_affine(sa0, smax_sub);
  out.sub_speed[1] = fit_speed_affine(sa1, smax_sub);

  // Communication: drop regressors the history cannot identify instead of
  // failing, so the adaptive loop keeps running on degenerate histories.
  auto fit_comm_guarded = [&](long long HistoryRecord::*size, double HistoryRecord::*time) {
    std::set<double> dp, dn;
    std::vector<std::array<double, 3>> samples;
    for (const auto& r : recs) {
      samples.push_back({static_cast<double>(r.num_subdomains),
                         static_cast<double>(r.*size), r.*time});
      dp.insert(static_cast<double>(r.num_subdomains));
      dn.insert(static_cast<double>(r.*size));
    }
    if (samples.size() >= 3 && dp.size() >= 2 && dn.size() >= 2) return fit_comm(samples);
    CommParams c;
    if (dn.size() >= 2 && samples.size() >= 2) {
      Mat x(static_cast<int>(samples.size()), 2);
      std::vector<double> y(samples.size());
      for (std::size_t i = 0; i < samples.size(); ++i) {
        x(static_cast<int>(i), 0) = samples[i][1];
        x(static_cast<int>(i), 1) = 1.0;
        y[i] = samples[i][2];
      }
      const auto coef = least_squares(x, y);
      c.beta = coef[0];
      c.gamma = coef[1];
    } else {
      double mean = 0.0;
      for (const auto& s : samples) mean += s[2];
      c.gamma = mean / samples.size();
    }
    return c;
  };
  out.gather = fit_comm_guarded(&HistoryRecord::nh1, &HistoryRecord::gather_one);
  out.bcast = fit_comm_guarded(&HistoryRecord::nh0, &HistoryRecord::bcast_one);

  const auto [cc, il] = running_averages(history, mlev);
  out.call_c_avg = cc;
  out.iter_l_avg = il;
  return out;
}

}  // namespace addm
