// Command-line front end: time-marching runs, (M, s) parameter sweeps,
// cost prediction from a recorded history, model fitting, and mesh
// generation.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "addm/errors.hpp"
#include "addm/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitInternal = 4;

std::vector<int> parse_int_list(const std::vector<std::string>& items) {
  std::vector<int> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start < item.size()) {
      std::size_t comma = item.find(',', start);
      if (comma == std::string::npos) comma = item.size();
      out.push_back(std::stoi(item.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level Schwarz solver toolkit with an adaptive (M, s) selector"};
  app.require_subcommand(1);

  std::string config_path, history_path, profile_path, out_path, mesh_out;
  std::vector<std::string> m_items, s_items;
  long long nh = 0, elems = 0;
  int core_budget = 64, n_min = 10, seeds = 3, mesh_nx = 8, mesh_ny = 8, mesh_degree = 1;

  auto* cmd_run = app.add_subcommand("run", "time-marching run driven by a config file");
  cmd_run->add_option("--config", config_path, "run configuration file")->required();

  auto* cmd_sweep = app.add_subcommand("sweep", "fixed-mesh cross product over (M, s)");
  cmd_sweep->add_option("--config", config_path, "run configuration file")->required();
  cmd_sweep->add_option("--M", m_items, "subdomain counts, comma separated")->required();
  cmd_sweep->add_option("--s", s_items, "splitting factors, comma separated")->required();
  cmd_sweep->add_option("--seeds", seeds, "seeds per cell (median reported)");
  cmd_sweep->add_option("--out", out_path, "output CSV path");

  auto* cmd_predict = app.add_subcommand("predict", "rank (M, s) candidates from a history CSV");
  cmd_predict->add_option("--history", history_path, "history CSV")->required();
  cmd_predict->add_option("--profile", profile_path, "hardware profile (comm fallback)");
  cmd_predict->add_option("--nh", nh, "global system size for the next step")->required();
  cmd_predict->add_option("--elems", elems, "mesh element count for the next step")->required();
  cmd_predict->add_option("--core-budget", core_budget, "available cores");
  cmd_predict->add_option("--n-min", n_min, "minimum elements per subdomain");

  auto* cmd_fit = app.add_subcommand("fit", "print fitted cost models from a history CSV");
  cmd_fit->add_option("--history", history_path, "history CSV")->required();

  auto* cmd_mesh = app.add_subcommand("mesh", "write a structured triangular mesh");
  cmd_mesh->add_option("--make", m_items, "nx ny")->expected(2)->required();
  cmd_mesh->add_option("--degree", mesh_degree, "polynomial degree");
  cmd_mesh->add_option("--out", mesh_out, "output mesh file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_run->parsed()) {
      const addm::RunConfig config = addm::parse_run_config(config_path);
      const addm::RunSummary summary = addm::run(config);
      std::printf("steps %zu  iterN %lld  iterL %lld  callC %lld  fl %lld\n",
                  summary.rows.size(), summary.iter_n_total, summary.iter_l_total,
                  summary.call_c_total, summary.fl_total);
      std::printf("Wtime %.6e  Tcomm %.6e  costs %.6e\n", summary.wtime_total,
                  summary.tcomm_total, summary.costs_total);
      if (!summary.rows.empty())
        std::printf("final M %d  s %d  Nh %lld\n", summary.rows.back().m,
                    summary.rows.back().s, summary.rows.back().nh);
      return kExitOk;
    }
    if (cmd_sweep->parsed()) {
      const addm::RunConfig config = addm::parse_run_config(config_path);
      const auto cells =
          addm::sweep(config, parse_int_list(m_items), parse_int_list(s_items), seeds);
      if (out_path.empty()) out_path = "sweep.csv";
      addm::write_sweep_csv(cells, out_path);
      int skipped = 0;
      for (const auto& c : cells) skipped += c.skipped ? 1 : 0;
      std::printf("sweep: %zu cells (%d skipped) -> %s\n", cells.size(), skipped,
                  out_path.c_str());
      return kExitOk;
    }
    if (cmd_predict->parsed()) {
      const addm::History history = addm::History::load_csv(history_path);
      addm::HardwareProfile profile = addm::HardwareProfile::reference();
      if (!profile_path.empty()) profile = addm::HardwareProfile::load(profile_path);
      const auto rep = addm::predict_report(history, static_cast<double>(nh), elems, core_budget,
                                            n_min, &profile);
      std::printf("%s\n", addm::describe_models(rep.models).c_str());
      std::printf("%6s %4s %14s %14s %14s\n", "M", "s", "compute", "comm", "total");
      for (const auto& c : rep.candidates) {
        std::printf("%6d %4d %14.6e %14.6e %14.6e%s\n", c.m, c.s, c.prediction.compute,
                    c.prediction.comm, c.prediction.total,
                    (c.m == rep.best.first && c.s == rep.best.second) ? "  <- argmin" : "");
      }
      if (!rep.past.empty()) {
        std::printf("\npredicted vs realized per recorded step:\n");
        for (const auto& p : rep.past)
          std::printf("  step %3d  predicted %.6e  actual %.6e\n", p.index, p.predicted,
                      p.actual);
      }
      return kExitOk;
    }
    if (cmd_fit->parsed()) {
      const addm::History history = addm::History::load_csv(history_path);
      const auto models = addm::fit_models(history);
      std::printf("%s", addm::describe_models(models).c_str());
      return kExitOk;
    }
    if (cmd_mesh->parsed()) {
      const auto dims = parse_int_list(m_items);
      if (dims.size() != 2) throw addm::ConfigError("mesh --make expects nx ny");
      mesh_nx = dims[0];
      mesh_ny = dims[1];
      const auto mesh = addm::build_structured_mesh(mesh_nx, mesh_ny, addm::Rect{}, mesh_degree);
      addm::write_mesh_text(mesh, mesh_out);
      std::printf("mesh: %d vertices, %d triangles -> %s\n", mesh.num_vertices(),
                  mesh.num_elements(), mesh_out.c_str());
      return kExitOk;
    }
  } catch (const addm::ConvergenceError& e) {
    std::fprintf(stderr, "convergence error: %s\n", e.what());
    return kExitConvergence;
  } catch (const addm::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const addm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInternal;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
