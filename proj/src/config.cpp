#include "addm/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "addm/errors.hpp"

namespace addm {

namespace {

const std::set<std::string> kKnownKeys = {
    "problem.epsilon", "problem.flux", "problem.linear_speed", "problem.penalty",
    "problem.boundary", "problem.initial", "problem.initial_amplitude",
    "mesh.nx", "mesh.ny", "mesh.x0", "mesh.y0", "mesh.x1", "mesh.y1", "mesh.degree", "mesh.q",
    "schedule.disc_x", "schedule.disc_y", "schedule.vel_x", "schedule.vel_y", "schedule.radius",
    "schedule.depth", "schedule.growth",
    "time.steps", "time.tau",
    "strategy.kind", "strategy.M", "strategy.kappa", "strategy.kappa_bootstrap", "strategy.mlev",
    "solver.mode", "solver.cl", "solver.gmres_max_iter", "solver.core_budget", "solver.n_min",
    "solver.balance_tol", "solver.seed",
    "newton.damping", "newton.refresh", "newton.max_iters", "newton.tol", "newton.max_retries",
    "cost.mode", "profile.path",
    "output.csv", "output.summary", "output.history",
};

class KeyValues {
 public:
  explicit KeyValues(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      if (!kKnownKeys.count(key))
        throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      kv_[key] = trim(line.substr(eq + 1));
    }
  }

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  double num(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
      std::size_t pos = 0;
      double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("config: bad numeric value for " + key + ": '" + it->second + "'");
    }
  }
  long long integer(const std::string& key, long long fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw ConfigError("config: " + key + " must be an integer");
    return static_cast<long long>(v);
  }

 private:
  static std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  std::map<std::string, std::string> kv_;
};

}  // namespace

std::function<double(Point2)> RunConfig::initial_condition() const {
  const double amp = initial_amplitude;
  const Rect dom = schedule.domain;
  if (initial_kind == "zero") return [](Point2) { return 0.0; };
  if (initial_kind == "constant") return [amp](Point2) { return amp; };
  if (initial_kind == "sine") {
    return [amp, dom](Point2 x) {
      const double u = (x.x - dom.x0) / dom.width();
      const double v = (x.y - dom.y0) / dom.height();
      return amp * std::sin(2.0 * M_PI * u) * std::sin(2.0 * M_PI * v);
    };
  }
  if (initial_kind == "bump") {
    const Point2 c = schedule.disc_start;
    const double r = schedule.disc_radius > 0.0 ? schedule.disc_radius
                                                : 0.15 * std::min(dom.width(), dom.height());
    const double s2 = 2.0 * (r / 1.5) * (r / 1.5);
    return [amp, c, s2](Point2 x) {
      const double d2 = (x.x - c.x) * (x.x - c.x) + (x.y - c.y) * (x.y - c.y);
      return amp * std::exp(-d2 / s2);
    };
  }
  throw ConfigError("config: unknown initial condition '" + initial_kind + "'");
}

RunConfig parse_run_config_text(const std::string& text) {
  KeyValues kv(text);
  RunConfig c;

  c.problem.viscosity = kv.num("problem.epsilon", 0.05);
  const std::string flux = kv.str("problem.flux", "burgers");
  if (flux == "burgers") c.problem.flux = ModelProblem::Flux::burgers;
  else if (flux == "linear") c.problem.flux = ModelProblem::Flux::linear;
  else throw ConfigError("config: problem.flux must be burgers or linear");
  c.problem.linear_speed = kv.num("problem.linear_speed", 1.0);
  c.problem.penalty_constant = kv.num("problem.penalty", 20.0);
  const std::string bc = kv.str("problem.boundary", "dirichlet");
  if (bc == "dirichlet") c.problem.boundary = ModelProblem::Boundary::dirichlet;
  else if (bc == "periodic") c.problem.boundary = ModelProblem::Boundary::periodic;
  else throw ConfigError("config: problem.boundary must be dirichlet or periodic");
  c.initial_kind = kv.str("problem.initial", "bump");
  c.initial_amplitude = kv.num("problem.initial_amplitude", 1.0);

  c.schedule.nx = static_cast<int>(kv.integer("mesh.nx", 8));
  c.schedule.ny = static_cast<int>(kv.integer("mesh.ny", 8));
  c.schedule.domain = {kv.num("mesh.x0", 0.0), kv.num("mesh.y0", 0.0), kv.num("mesh.x1", 1.0),
                       kv.num("mesh.y1", 1.0)};
  c.schedule.degree = static_cast<int>(kv.integer("mesh.degree", 2));
  c.temporal_degree = static_cast<int>(kv.integer("mesh.q", 1));
  c.schedule.disc_start = {kv.num("schedule.disc_x", 0.3), kv.num("schedule.disc_y", 0.5)};
  c.schedule.disc_velocity = {kv.num("schedule.vel_x", 0.01), kv.num("schedule.vel_y", 0.0)};
  c.schedule.disc_radius = kv.num("schedule.radius", 0.15);
  c.schedule.target_depth = static_cast<int>(kv.integer("schedule.depth", 2));
  c.schedule.growth_per_step = kv.num("schedule.growth", 0.0);

  c.steps = static_cast<int>(kv.integer("time.steps", 10));
  c.tau = kv.num("time.tau", 0.02);
  if (c.steps < 1 || !(c.tau > 0.0)) throw ConfigError("config: need time.steps >= 1, time.tau > 0");

  const std::string strat = kv.str("strategy.kind", "fix");
  if (strat == "fix") c.strategy = Strategy::fix;
  else if (strat == "equi") c.strategy = Strategy::equi;
  else if (strat == "adapt") c.strategy = Strategy::adapt;
  else throw ConfigError("config: strategy.kind must be fix, equi or adapt");
  c.fix_subdomains = static_cast<int>(kv.integer("strategy.M", 4));
  c.kappa = kv.num("strategy.kappa", 4000.0);
  c.kappa_bootstrap = kv.num("strategy.kappa_bootstrap", 2500.0);
  c.mlev = static_cast<int>(kv.integer("strategy.mlev", 5));
  if (c.fix_subdomains < 1 || !(c.kappa >= 1.0) || !(c.kappa_bootstrap >= 1.0) || c.mlev < 1)
    throw ConfigError("config: strategy parameters must be positive");

  const std::string mode = kv.str("solver.mode", "hybrid");
  if (mode == "hybrid") c.solver.mode = PrecondMode::hybrid;
  else if (mode == "additive") c.solver.mode = PrecondMode::additive;
  else throw ConfigError("config: solver.mode must be hybrid or additive");
  c.solver.gmres_reduction = kv.num("solver.cl", 1e-4);
  c.solver.gmres_max_iter = static_cast<int>(kv.integer("solver.gmres_max_iter", 2000));
  c.solver.core_budget = static_cast<int>(kv.integer("solver.core_budget", 64));
  c.solver.n_min = static_cast<int>(kv.integer("solver.n_min", 10));
  c.solver.balance_tol = kv.num("solver.balance_tol", 0.10);
  c.solver.seed = static_cast<unsigned long long>(kv.integer("solver.seed", 1));
  c.solver.newton.damping_factor = kv.num("newton.damping", 0.65);
  c.solver.newton.refresh_threshold = kv.num("newton.refresh", 0.5);
  c.solver.newton.max_iters = static_cast<int>(kv.integer("newton.max_iters", 50));
  c.solver.newton.residual_tolerance = kv.num("newton.tol", 1e-6);
  c.solver.newton.max_damping_retries = static_cast<int>(kv.integer("newton.max_retries", 30));
  c.solver.newton.validate();

  const std::string cost = kv.str("cost.mode", "synthetic");
  if (cost == "synthetic") c.cost_mode = CostMode::synthetic;
  else if (cost == "measured") c.cost_mode = CostMode::measured;
  else throw ConfigError("config: cost.mode must be synthetic or measured");
  c.profile_path = kv.str("profile.path", "");
  c.profile = c.profile_path.empty() ? HardwareProfile::reference()
                                     : HardwareProfile::load(c.profile_path);

  c.out_csv = kv.str("output.csv", "");
  c.out_summary = kv.str("output.summary", "");
  c.out_history = kv.str("output.history", "");

  c.problem.validate();
  const auto u0 = c.initial_condition();
  c.problem.dirichlet_value = [u0](Point2 x, double) { return u0(x); };
  return c;
}

RunConfig parse_run_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_run_config_text(ss.str());
}

}  // namespace addm
