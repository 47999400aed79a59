#include "addm/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "addm/errors.hpp"

namespace addm {

namespace {

std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

int clamp_subdomains(long long m, long long num_elements, const SolverSettings& s) {
  long long cap = std::min<long long>(s.core_budget, num_elements / s.n_min);
  cap = std::max<long long>(1, std::min(cap, num_elements));
  return static_cast<int>(std::max<long long>(1, std::min(m, cap)));
}

// s chosen so the coarse mesh has at most half the elements of a subdomain.
int half_rule_splitting(long long num_elements, int m) {
  return static_cast<int>(std::max<long long>(1, num_elements / (2LL * m * m)));
}

std::vector<double> constant_in_time(const STDGSpace& space, const std::vector<double>& trace) {
  std::vector<double> w(space.dim(), 0.0);
  for (int k = 0; k < space.mesh().num_elements(); ++k) {
    const int d = space.element_basis(k).dim();
    for (int i = 0; i < d; ++i)
      w[space.block_offset(k) + space.local_index(k, 0, i)] =
          trace[space.spatial_offset(k) + i];
  }
  return w;
}

struct MsChoice {
  int m = 1;
  int s = 1;
};

MsChoice select_ms(const RunConfig& config, const History& history, long long nh,
                   long long num_elements, const HardwareProfile& profile) {
  MsChoice out;
  switch (config.strategy) {
    case Strategy::fix: {
      out.m = clamp_subdomains(config.fix_subdomains, num_elements, config.solver);
      out.s = half_rule_splitting(num_elements, out.m);
      break;
    }
    case Strategy::equi: {
      const long long m = std::max<long long>(
          1, std::llround(static_cast<double>(nh) / config.kappa));
      out.m = clamp_subdomains(m, num_elements, config.solver);
      out.s = half_rule_splitting(num_elements, out.m);
      break;
    }
    case Strategy::adapt: {
      if (fits_ready(history)) {
        FittedModels models = fit_models(history, config.mlev);
        std::set<int> distinct_m;
        for (const auto& r : history.records()) distinct_m.insert(r.num_subdomains);
        if (distinct_m.size() < 2) {
          models.gather = profile.gather;
          models.bcast = profile.bcast;
        }
        const auto candidates =
            enumerate_candidates(num_elements, config.solver.core_budget, config.solver.n_min);
        const auto [m, s] = choose(models, static_cast<double>(nh), num_elements, candidates,
                                   config.solver.mode);
        out.m = m;
        out.s = s;
      } else {
        const auto [m, s] =
            bootstrap_choice(static_cast<double>(nh), num_elements, config.kappa_bootstrap);
        (void)s;
        out.m = clamp_subdomains(m, num_elements, config.solver);
        out.s = half_rule_splitting(num_elements, out.m);
      }
      break;
    }
  }
  return out;
}

HistoryRecord make_history_record(const STDGSpace& space, const SlabOutcome& outcome,
                                  int num_subdomains, const HardwareProfile& profile) {
  const SlabLedger& lg = outcome.ledger;
  HistoryRecord r;
  r.nh = space.dim();
  r.nh0 = lg.sizes[0];
  // Largest local system carries index 1 of the record.
  std::size_t big = 1;
  for (std::size_t i = 2; i < lg.sizes.size(); ++i)
    if (lg.sizes[i] > lg.sizes[big]) big = i;
  r.nh1 = lg.sizes[big];
  r.fac_flops0 = lg.fac_flops[0];
  r.sub_flops0 = lg.sub_flops[0];
  r.fac_flops1 = lg.fac_flops[big];
  r.sub_flops1 = lg.sub_flops[big];
  auto speed = [](long long fl, double t) { return t > 0.0 ? fl / t : 0.0; };
  r.fac_speed0 = speed(lg.fac_flops[0], outcome.cost.fac_seconds[0]);
  r.sub_speed0 = speed(lg.sub_flops[0], outcome.cost.sub_seconds[0]);
  r.fac_speed1 = speed(lg.fac_flops[big], outcome.cost.fac_seconds[big]);
  r.sub_speed1 = speed(lg.sub_flops[big], outcome.cost.sub_seconds[big]);
  r.call_c = outcome.report.matrix_evaluations;
  r.iter_l = outcome.report.gmres_iterations;
  r.num_subdomains = num_subdomains;
  r.gather_one = profile.gather.time(static_cast<double>(r.nh1), num_subdomains);
  r.bcast_one = profile.bcast.time(static_cast<double>(r.nh0), num_subdomains);
  return r;
}

}  // namespace

SlabOutcome run_slab(const STDGSpace& space, const ModelProblem& problem,
                     const std::vector<double>& w0, const std::vector<double>& trace, double t0,
                     double tau, int num_subdomains, int splitting,
                     const SolverSettings& settings, const HardwareProfile& profile,
                     CostMode cost_mode) {
  const ElementGraph graph = adjacency_graph(space.mesh(), space.components(),
                                             space.temporal_degree());
  DecompPlan plan =
      partition_elements(graph, num_subdomains, settings.balance_tol, settings.seed);
  long long min_sub = graph.num_nodes;
  {
    std::vector<long long> count(num_subdomains, 0);
    for (int v = 0; v < graph.num_nodes; ++v) ++count[plan.subdomain_of[v]];
    for (long long c : count) min_sub = std::min(min_sub, c);
  }
  const int s_eff = static_cast<int>(std::min<long long>(splitting, min_sub));
  plan = split_coarse(plan, std::max(1, s_eff), graph);

  TwoLevelPreconditioner precond(settings.mode, space, plan);
  precond.set_coarse(build_coarse_restriction(space, plan));

  SlabAssembler assembler(space, problem, t0, tau);
  const bool measure = cost_mode == CostMode::measured;
  LinearSolverHooks hooks;
  hooks.matrix_updated = [&](const BlockSparseMatrix& a) { precond.factorize(a, measure); };
  hooks.solve = [&](const BlockSparseMatrix& a, const std::vector<double>& rhs) {
    GmresResult res =
        gmres(a, &precond, rhs, settings.gmres_reduction, settings.gmres_max_iter);
    return std::make_pair(std::move(res.x), res.iterations);
  };

  SlabOutcome out;
  auto [w, report] = newton_solve(assembler, w0, trace, hooks, settings.newton);
  out.w = std::move(w);
  out.report = std::move(report);
  if (!out.report.converged)
    throw ConvergenceError("run_slab: Newton did not converge within max_iters");
  out.ledger = SlabLedger::from_preconditioner(precond, out.report.matrix_evaluations,
                                               out.report.gmres_iterations);
  out.cost = simulate_parallel_step(out.ledger, profile, cost_mode);
  out.coarse_size = out.ledger.sizes[0];
  out.max_local_size = precond.max_local_size();
  return out;
}

RunSummary run(const RunConfig& config) {
  const AdaptSchedule schedule(config.schedule);
  const auto u0 = config.initial_condition();

  RunSummary summary;
  std::shared_ptr<TriMesh> mesh;
  std::unique_ptr<STDGSpace> space;
  std::vector<double> w;
  std::uint64_t mesh_version = 0;
  MsChoice ms;

  for (int step = 0; step < config.steps; ++step) {
    const double t0 = step * config.tau;
    std::vector<double> trace;
    bool changed = false;
    if (!mesh) {
      mesh = std::make_shared<TriMesh>(schedule.mesh_for_step(step));
      changed = true;
    } else {
      auto [next, chg] = schedule.next_mesh(step, *mesh);
      if (chg) mesh = std::make_shared<TriMesh>(std::move(next));
      changed = chg;
    }
    if (changed) {
      auto new_space = std::make_unique<STDGSpace>(mesh, config.temporal_degree, 1);
      if (!space) {
        trace = new_space->project_spatial(u0);
      } else {
        trace = transfer_trace(*space, space->end_value(w), *new_space);
      }
      space = std::move(new_space);
      w = constant_in_time(*space, trace);
      ms = select_ms(config, summary.history, space->dim(), space->mesh().num_elements(),
                     config.profile);
      ++mesh_version;
    } else {
      trace = space->end_value(w);
    }

    SlabOutcome outcome;
    try {
      outcome = run_slab(*space, config.problem, w, trace, t0, config.tau, ms.m, ms.s,
                         config.solver, config.profile, config.cost_mode);
    } catch (const Error& e) {
      throw ConvergenceError("run: step " + std::to_string(step) + " (solve phase): " + e.what());
    }
    w = std::move(outcome.w);

    StepRow row;
    row.step = step;
    row.t = (step + 1) * config.tau;
    row.nh = space->dim();
    row.m = ms.m;
    row.s = ms.s;
    row.nh0 = outcome.coarse_size;
    row.iter_n = outcome.report.newton_iterations;
    row.iter_l = outcome.report.gmres_iterations;
    row.call_c = outcome.report.matrix_evaluations;
    row.fl = outcome.cost.flops;
    row.wtime = outcome.cost.wtime;
    row.tcomm = outcome.cost.tcomm;
    row.costs = outcome.cost.costs;
    summary.rows.push_back(row);
    summary.iter_n_total += row.iter_n;
    summary.iter_l_total += row.iter_l;
    summary.call_c_total += row.call_c;
    summary.fl_total += row.fl;
    summary.wtime_total += row.wtime;
    summary.tcomm_total += row.tcomm;
    summary.costs_total += row.costs;
    summary.residual_histories.push_back(outcome.report.residual_norms);

    if (config.strategy == Strategy::adapt) {
      summary.history.record(mesh_version,
                             make_history_record(*space, outcome, ms.m, config.profile));
    }
  }

  if (!config.out_csv.empty()) write_run_csv(summary, config.out_csv);
  if (!config.out_summary.empty()) write_summary_json(summary, config, config.out_summary);
  if (!config.out_history.empty() && config.strategy == Strategy::adapt)
    summary.history.save_csv(config.out_history);
  return summary;
}

void write_run_csv(const RunSummary& summary, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_run_csv: cannot open " + path);
  f << "step,t_m,Nhm,M,s,NH,iterN,iterL,callC,flm,Wtime,Tcomm,costs\n";
  for (const auto& r : summary.rows) {
    f << r.step << ',' << sci(r.t) << ',' << r.nh << ',' << r.m << ',' << r.s << ',' << r.nh0
      << ',' << r.iter_n << ',' << r.iter_l << ',' << r.call_c << ',' << r.fl << ','
      << sci(r.wtime) << ',' << sci(r.tcomm) << ',' << sci(r.costs) << '\n';
  }
}

void write_summary_json(const RunSummary& summary, const RunConfig& config,
                        const std::string& path) {
  nlohmann::ordered_json j;
  j["steps"] = summary.rows.size();
  j["strategy"] = config.strategy == Strategy::fix    ? "fix"
                  : config.strategy == Strategy::equi ? "equi"
                                                      : "adapt";
  j["iterN"] = summary.iter_n_total;
  j["iterL"] = summary.iter_l_total;
  j["callC"] = summary.call_c_total;
  j["fl"] = summary.fl_total;
  j["Wtime"] = sci(summary.wtime_total);
  j["Tcomm"] = sci(summary.tcomm_total);
  j["costs"] = sci(summary.costs_total);
  if (!summary.rows.empty()) {
    j["final_M"] = summary.rows.back().m;
    j["final_s"] = summary.rows.back().s;
    j["final_Nh"] = summary.rows.back().nh;
  }
  std::ofstream f(path);
  if (!f) throw ConfigError("write_summary_json: cannot open " + path);
  f << j.dump(2) << '\n';
}

std::vector<SweepCell> sweep(const RunConfig& config, const std::vector<int>& m_list,
                             const std::vector<int>& s_list, int num_seeds) {
  auto mesh = std::make_shared<TriMesh>(build_structured_mesh(
      config.schedule.nx, config.schedule.ny, config.schedule.domain, config.schedule.degree));
  STDGSpace space(mesh, config.temporal_degree, 1);
  const long long elems = mesh->num_elements();
  const auto u0 = config.initial_condition();
  const auto trace0 = space.project_spatial(u0);

  std::vector<SweepCell> cells;
  for (int m : m_list) {
    for (int s : s_list) {
      SweepCell cell;
      cell.m = m;
      cell.s = s;
      cell.local_elems = std::llround(static_cast<double>(elems) / m);
      cell.coarse_elems = static_cast<long long>(m) * s;
      const long long m_cap =
          std::min<long long>(config.solver.core_budget, elems / config.solver.n_min);
      if (m < 1 || m > m_cap) {
        cell.skipped = true;
        cell.note = "M outside the admissible range";
        cells.push_back(cell);
        continue;
      }
      if (s < 1 || s > std::max<long long>(1, elems / (static_cast<long long>(m) * m))) {
        cell.skipped = true;
        cell.note = "s exceeds #Th/M^2";
        cells.push_back(cell);
        continue;
      }

      std::vector<long long> iter_n_s, iter_l_s, call_c_s, fl_s;
      std::vector<double> wtime_s, tcomm_s;
      try {
        for (int sd = 0; sd < num_seeds; ++sd) {
          std::mt19937_64 rng(config.solver.seed + 1000003ULL * sd);
          auto trace = trace0;
          const double amp = 1e-3 * std::max(1.0, config.initial_amplitude);
          for (double& v : trace)
            v += amp * (2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0);
          auto w = std::vector<double>();
          w.reserve(space.dim());
          {
            std::vector<double> tmp(space.dim(), 0.0);
            for (int k = 0; k < mesh->num_elements(); ++k)
              for (int i = 0; i < space.element_basis(k).dim(); ++i)
                tmp[space.block_offset(k) + space.local_index(k, 0, i)] =
                    trace[space.spatial_offset(k) + i];
            w = std::move(tmp);
          }
          long long in = 0, il = 0, cc = 0, fl = 0;
          double wt = 0.0, tc = 0.0;
          for (int step = 0; step < config.steps; ++step) {
            auto outcome = run_slab(space, config.problem, w, trace, step * config.tau,
                                    config.tau, m, s, config.solver, config.profile,
                                    config.cost_mode);
            w = std::move(outcome.w);
            trace = space.end_value(w);
            in += outcome.report.newton_iterations;
            il += outcome.report.gmres_iterations;
            cc += outcome.report.matrix_evaluations;
            fl += outcome.cost.flops;
            wt += outcome.cost.wtime;
            tc += outcome.cost.tcomm;
          }
          iter_n_s.push_back(in);
          iter_l_s.push_back(il);
          call_c_s.push_back(cc);
          fl_s.push_back(fl);
          wtime_s.push_back(wt);
          tcomm_s.push_back(tc);
        }
      } catch (const Error& e) {
        cell.skipped = true;
        cell.note = e.what();
        cells.push_back(cell);
        continue;
      }
      auto med = [](auto v) {
        std::sort(v.begin(), v.end());
        return v[v.size() / 2];
      };
      cell.iter_n = med(iter_n_s);
      cell.iter_l = med(iter_l_s);
      cell.call_c = med(call_c_s);
      cell.fl = med(fl_s);
      cell.wtime = med(wtime_s);
      cell.tcomm = med(tcomm_s);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_sweep_csv(const std::vector<SweepCell>& cells, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("write_sweep_csv: cannot open " + path);
  f << "M,n_i,n_0,iterNa,iterLa,callCa,fl,Wtime,comm,note\n";
  for (const auto& c : cells) {
    if (c.skipped) {
      f << c.m << ',' << c.local_elems << ',' << c.coarse_elems << ",,,,,,," << c.note << '\n';
      continue;
    }
    f << c.m << ',' << c.local_elems << ',' << c.coarse_elems << ',' << c.iter_n << ','
      << c.iter_l << ',' << c.call_c << ',' << c.fl << ',' << sci(c.wtime) << ',' << sci(c.tcomm)
      << ",\n";
  }
}

double record_actual_cost(const HistoryRecord& r) {
  auto t = [](long long fl, double sp) { return sp > 0.0 ? fl / sp : 0.0; };
  const double fac = std::max(t(r.fac_flops0, r.fac_speed0), t(r.fac_flops1, r.fac_speed1));
  const double sub = t(r.sub_flops0, r.sub_speed0) + t(r.sub_flops1, r.sub_speed1);
  return r.call_c * fac + r.iter_l * sub + r.iter_l * (r.gather_one + r.bcast_one);
}

PredictReport predict_report(const History& history, double nh, long long num_elements,
                             int core_budget, int n_min, const HardwareProfile* comm_fallback,
                             int mlev) {
  if (history.size() < 2)
    throw ConfigError("predict_report: at least 2 history records are required, have " +
                      std::to_string(history.size()));
  if (!fits_ready(history))
    throw ConfigError(
        "predict_report: history cannot support the fits yet; run more steps (bootstrap)");

  PredictReport rep;
  rep.models = fit_models(history, mlev);
  std::set<int> distinct_m;
  for (const auto& r : history.records()) distinct_m.insert(r.num_subdomains);
  if (distinct_m.size() < 2 && comm_fallback) {
    rep.models.gather = comm_fallback->gather;
    rep.models.bcast = comm_fallback->bcast;
  }

  const auto candidates = enumerate_candidates(num_elements, core_budget, n_min);
  for (const auto& [m, s] : candidates)
    rep.candidates.push_back({m, s, predict_cost(rep.models, nh, num_elements, m, s)});
  rep.best = choose(rep.models, nh, num_elements, candidates);

  // Walk-forward comparison on the recorded steps.
  History prefix;
  const auto& recs = history.records();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    if (k >= 2 && fits_ready(prefix)) {
      FittedModels m = fit_models(prefix, mlev);
      if (comm_fallback) {
        std::set<int> dm;
        for (std::size_t i = 0; i < k; ++i) dm.insert(recs[i].num_subdomains);
        if (dm.size() < 2) {
          m.gather = comm_fallback->gather;
          m.bcast = comm_fallback->bcast;
        }
      }
      const HistoryRecord& r = recs[k];
      const double n1 = static_cast<double>(r.nh1);
      const double n0 = static_cast<double>(r.nh0);
      const double fac0 = m.fac_flops[0](n0) / m.fac_speed[0](n0);
      const double fac1 = m.fac_flops[1](n1) / m.fac_speed[1](n1);
      const double sub0 = m.sub_flops[0](n0) / m.sub_speed[0](n0);
      const double sub1 = m.sub_flops[1](n1) / m.sub_speed[1](n1);
      const double predicted = m.call_c_avg * std::max(fac0, fac1) +
                               m.iter_l_avg * (sub0 + sub1) +
                               m.iter_l_avg * (m.gather.time(n1, r.num_subdomains) +
                                               m.bcast.time(n0, r.num_subdomains));
      rep.past.push_back({static_cast<int>(k), predicted, record_actual_cost(r)});
    }
    prefix.record(k, recs[k]);
  }
  return rep;
}

std::string describe_models(const FittedModels& m) {
  std::ostringstream os;
  char buf[256];
  auto line = [&](const char* label, double a, double b) {
    std::snprintf(buf, sizeof buf, "  %-22s %14.6e %14.6e\n", label, a, b);
    os << buf;
  };
  os << "power laws  fl(N) = C N^mu        C              mu\n";
  line("factorization coarse", m.fac_flops[0].c, m.fac_flops[0].mu);
  line("factorization local", m.fac_flops[1].c, m.fac_flops[1].mu);
  line("substitution coarse", m.sub_flops[0].c, m.sub_flops[0].mu);
  line("substitution local", m.sub_flops[1].c, m.sub_flops[1].mu);
  os << "speeds  sp(N) = min(Smax, a N + b)  a              b            Smax\n";
  auto sline = [&](const char* label, const AffineSpeed& s) {
    std::snprintf(buf, sizeof buf, "  %-22s %14.6e %14.6e %14.6e%s\n", label, s.a, s.b, s.smax,
                  s.degenerate ? "  (flat)" : "");
    os << buf;
  };
  sline("factorization coarse", m.fac_speed[0]);
  sline("factorization local", m.fac_speed[1]);
  sline("substitution coarse", m.sub_speed[0]);
  sline("substitution local", m.sub_speed[1]);
  os << "communication  T = alpha log2 P + beta N + gamma\n";
  std::snprintf(buf, sizeof buf, "  gather    %14.6e %14.6e %14.6e\n", m.gather.alpha,
                m.gather.beta, m.gather.gamma);
  os << buf;
  std::snprintf(buf, sizeof buf, "  broadcast %14.6e %14.6e %14.6e\n", m.bcast.alpha,
                m.bcast.beta, m.bcast.gamma);
  os << buf;
  std::snprintf(buf, sizeof buf, "averages  callC = %.3f  iterL = %.3f\n", m.call_c_avg,
                m.iter_l_avg);
  os << buf;
  return os.str();
}

}  // namespace addm
