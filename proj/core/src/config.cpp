#include "abcheck/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "abcheck/ode_pairs.hpp"
#include "abcheck/pde_heat.hpp"
#include "abcheck/pde_ns.hpp"

namespace abcheck {

namespace {

using nlohmann::json;

struct ProblemInfo {
  std::string id;
  int heat_config = 0;
  double b = 0.0;
  double re = 0.0;
};

ProblemInfo problem_info(std::string_view id) {
  if (id == "vdp-b2") return {std::string(id), 0, 2.0, 0.0};
  if (id == "vdp-b3") return {std::string(id), 0, 3.0, 0.0};
  if (id == "heat-cfg1") return {std::string(id), 1, 0.0, 0.0};
  if (id == "heat-cfg2") return {std::string(id), 2, 0.0, 0.0};
  if (id == "heat-cfg3") return {std::string(id), 3, 0.0, 0.0};
  if (id == "ns-re2000") return {std::string(id), 0, 0.0, 2000.0};
  if (id == "ns-re20") return {std::string(id), 0, 0.0, 20.0};
  if (id == "exponential" || id == "stiff") return {std::string(id), 0, 0.0, 0.0};
  throw ConfigError("unknown problem id '" + std::string(id) + "'");
}

bool is_rk_like(std::string_view scheme) {
  return scheme == "rk45" || scheme == "rk23" || scheme == "rk-midpoint-euler" ||
         scheme == "extrapolation1";
}

void check_keys(const json& object, std::initializer_list<std::string_view> allowed,
                std::string_view section) {
  if (!object.is_object()) throw ConfigError("config: '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : object.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) {
      throw ConfigError("config: unknown key '" + key + "' in section '" + std::string(section) +
                        "'");
    }
  }
}

template <typename T>
void read_into(const json& object, const char* key, T& out) {
  if (auto it = object.find(key); it != object.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config: bad value for '") + key + "': " + e.what());
    }
  }
}

template <typename T>
void read_into(const json& object, const char* key, std::optional<T>& out) {
  if (auto it = object.find(key); it != object.end()) {
    if (it->is_null()) {
      out.reset();
      return;
    }
    T value{};
    read_into(object, key, value);
    out = value;
  }
}

template <typename T>
void write_opt(json& object, const char* key, const std::optional<T>& value) {
  if (value) object[key] = *value;
}

}  // namespace

const std::vector<std::string>& problem_ids() {
  static const std::vector<std::string> ids{"vdp-b2",    "vdp-b3",    "heat-cfg1",
                                            "heat-cfg2", "heat-cfg3", "ns-re2000",
                                            "ns-re20",   "exponential", "stiff"};
  return ids;
}

bool is_heat_problem(std::string_view id) { return id.starts_with("heat-cfg"); }
bool is_ns_problem(std::string_view id) { return id.starts_with("ns-"); }
bool is_vdp_problem(std::string_view id) { return id.starts_with("vdp-"); }

std::string default_scheme(std::string_view problem_id) {
  (void)problem_info(problem_id);
  if (is_heat_problem(problem_id)) return "r-cn";
  if (is_ns_problem(problem_id)) return "projection-extrapolation1";
  return "rk45";
}

double default_dt(std::string_view problem_id, std::string_view scheme) {
  const ProblemInfo info = problem_info(problem_id);
  if (info.heat_config != 0) return heat::table_time_steps(info.heat_config)[0];
  if (is_ns_problem(problem_id)) return 1.0 / 100.0;
  if (problem_id == "vdp-b2") return is_rk_like(scheme) ? 1.0 / 10.0 : 1.0 / 20.0;
  if (problem_id == "vdp-b3") return is_rk_like(scheme) ? 1.0 / 15.0 : 1.0 / 35.0;
  if (problem_id == "stiff") return 1.0 / 100.0;
  return 1.0 / 10.0;
}

FaultMode default_fault_mode(std::string_view problem_id) {
  const ProblemInfo info = problem_info(problem_id);
  switch (info.heat_config) {
    case 1: return FaultMode::kDerivativeEval;
    case 2: return FaultMode::kLinearRhs;
    case 3: return FaultMode::kPreviousSolution;
    default: break;
  }
  if (problem_id == "ns-re2000") return FaultMode::kPreviousSolution;
  if (problem_id == "ns-re20") return FaultMode::kLinearRhs;
  return FaultMode::kDerivativeEval;
}

double default_sigma2(std::string_view problem_id, std::string_view scheme, FaultMode mode) {
  const ProblemInfo info = problem_info(problem_id);
  const bool cn = scheme == "r-cn";
  switch (info.heat_config) {
    case 1: return cn ? 1e-3 : 1e-1;
    case 2: return cn ? 1e-6 : 5e-5;
    case 3: return cn ? 1e-6 : 1e-4;
    default: break;
  }
  if (is_ns_problem(problem_id)) return mode == FaultMode::kLinearRhs ? 2.0 : 0.5;
  return 1e-1;
}

ExperimentConfig preset(std::string_view problem_id, std::string_view scheme) {
  ExperimentConfig c;
  c.problem.id = problem_info(problem_id).id;
  c.scheme = scheme.empty() ? default_scheme(problem_id) : std::string(scheme);
  c.fault.mode = default_fault_mode(problem_id);
  c.fault.sigma2 = default_sigma2(problem_id, c.scheme, c.fault.mode);
  c.validate();
  return c;
}

double ExperimentConfig::dt() const {
  return problem.dt ? *problem.dt : default_dt(problem.id, scheme);
}

void ExperimentConfig::validate() const {
  (void)problem_info(problem.id);
  const bool ok = is_heat_problem(problem.id)  ? heat::is_heat_scheme(scheme)
                  : is_ns_problem(problem.id) ? scheme == "projection-extrapolation1"
                                              : ode::is_ode_scheme(scheme);
  if (!ok) {
    throw ConfigError("scheme '" + scheme + "' is not available for problem '" + problem.id + "'");
  }
  if (!(dt() > 0.0)) throw ConfigError("config: dt must be positive");
  if (problem.t_end && !(*problem.t_end > 0.0)) throw ConfigError("config: t_end must be positive");
  detector.validate();
  fault.validate();
  if (experiment.trials < 1) throw ConfigError("config: trials must be >= 1");
  if (experiment.bandwidth && !(*experiment.bandwidth > 0.0)) {
    throw ConfigError("config: bandwidth must be positive");
  }
  if (experiment.grid_points < 1) throw ConfigError("config: grid_points must be >= 1");
}

std::string ExperimentConfig::to_json() const {
  json j;
  json p;
  p["id"] = problem.id;
  write_opt(p, "dt", problem.dt);
  write_opt(p, "t_end", problem.t_end);
  write_opt(p, "b", problem.b);
  write_opt(p, "re", problem.re);
  write_opt(p, "grid", problem.grid);
  write_opt(p, "upwind_blend", problem.upwind_blend);
  j["problem"] = p;
  j["scheme"] = scheme;
  j["norm"] = std::string(to_string(norm));
  j["detector"] = {{"gamma_up", detector.gamma_up},
                   {"gamma_down", detector.gamma_down},
                   {"window_p", detector.window_p},
                   {"tau_j0", detector.tau_j0},
                   {"tau_v0", detector.tau_v0},
                   {"mode", std::string(to_string(detector.mode))},
                   {"adapt_on_flag", detector.adapt_on_flag}};
  json f;
  f["enabled"] = fault_enabled;
  f["mode"] = std::string(to_string(fault.mode));
  f["sigma2"] = fault.sigma2;
  write_opt(f, "step", fault.step);
  write_opt(f, "slot", fault.slot);
  write_opt(f, "component", fault.component);
  write_opt(f, "factor", fault.factor);
  j["fault"] = f;
  json e;
  e["trials"] = experiment.trials;
  e["seed"] = experiment.seed;
  e["threads"] = experiment.threads;
  write_opt(e, "bandwidth", experiment.bandwidth);
  e["grid_points"] = experiment.grid_points;
  j["experiment"] = e;
  return j.dump();
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, {"problem", "scheme", "norm", "detector", "fault", "experiment"}, "root");

  std::string id = "vdp-b2";
  if (auto it = j.find("problem"); it != j.end()) read_into(*it, "id", id);
  std::string scheme;
  read_into(j, "scheme", scheme);
  ExperimentConfig c = preset(id, scheme);

  if (auto it = j.find("problem"); it != j.end()) {
    check_keys(*it, {"id", "dt", "t_end", "b", "re", "grid", "upwind_blend"}, "problem");
    read_into(*it, "dt", c.problem.dt);
    read_into(*it, "t_end", c.problem.t_end);
    read_into(*it, "b", c.problem.b);
    read_into(*it, "re", c.problem.re);
    read_into(*it, "grid", c.problem.grid);
    read_into(*it, "upwind_blend", c.problem.upwind_blend);
  }
  if (auto it = j.find("norm"); it != j.end()) {
    std::string norm;
    read_into(j, "norm", norm);
    c.norm = parse_norm(norm);
  }
  if (auto it = j.find("detector"); it != j.end()) {
    check_keys(*it, {"gamma_up", "gamma_down", "window_p", "tau_j0", "tau_v0", "mode",
                      "adapt_on_flag"},
               "detector");
    read_into(*it, "gamma_up", c.detector.gamma_up);
    read_into(*it, "gamma_down", c.detector.gamma_down);
    read_into(*it, "window_p", c.detector.window_p);
    read_into(*it, "tau_j0", c.detector.tau_j0);
    read_into(*it, "tau_v0", c.detector.tau_v0);
    read_into(*it, "adapt_on_flag", c.detector.adapt_on_flag);
    if (it->contains("mode")) {
      std::string mode;
      read_into(*it, "mode", mode);
      c.detector.mode = parse_detector_mode(mode);
    }
  }
  if (auto it = j.find("fault"); it != j.end()) {
    check_keys(*it, {"enabled", "mode", "sigma2", "step", "slot", "component", "factor"},
               "fault");
    read_into(*it, "enabled", c.fault_enabled);
    if (it->contains("mode")) {
      std::string mode;
      read_into(*it, "mode", mode);
      c.fault.mode = parse_fault_mode(mode);
      c.fault.sigma2 = default_sigma2(c.problem.id, c.scheme, c.fault.mode);
    }
    read_into(*it, "sigma2", c.fault.sigma2);
    read_into(*it, "step", c.fault.step);
    read_into(*it, "slot", c.fault.slot);
    read_into(*it, "component", c.fault.component);
    read_into(*it, "factor", c.fault.factor);
  }
  if (auto it = j.find("experiment"); it != j.end()) {
    check_keys(*it, {"trials", "seed", "threads", "bandwidth", "grid_points"}, "experiment");
    read_into(*it, "trials", c.experiment.trials);
    read_into(*it, "seed", c.experiment.seed);
    read_into(*it, "threads", c.experiment.threads);
    read_into(*it, "bandwidth", c.experiment.bandwidth);
    read_into(*it, "grid_points", c.experiment.grid_points);
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return from_json(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

StepperFactory make_stepper_factory(const ExperimentConfig& config) {
  config.validate();
  const ProblemInfo info = problem_info(config.problem.id);
  const double dt = config.dt();
  const std::string scheme = config.scheme;

  if (info.heat_config != 0) {
    heat::HeatProblem problem = heat::table_config(info.heat_config, dt);
    if (config.problem.t_end) {
      problem.t_end = *config.problem.t_end;
      problem.validate();
    }
    const heat::HeatScheme hs = heat::parse_heat_scheme(scheme);
    return [problem, hs]() -> std::unique_ptr<PairStepper> {
      return std::make_unique<heat::HeatPairStepper>(problem, hs);
    };
  }

  if (is_ns_problem(config.problem.id)) {
    ns::NsProblem problem = ns::driven_cavity(config.problem.re.value_or(info.re));
    problem.dt = dt;
    if (config.problem.t_end) problem.t_end = *config.problem.t_end;
    if (config.problem.grid) problem.nx = problem.ny = *config.problem.grid;
    if (config.problem.upwind_blend) problem.upwind_blend = *config.problem.upwind_blend;
    problem.validate();
    return [problem]() -> std::unique_ptr<PairStepper> {
      return std::make_unique<ns::NsPairStepper>(problem);
    };
  }

  ode::OdeProblem problem;
  if (is_vdp_problem(config.problem.id)) {
    problem = ode::problems::van_der_pol(config.problem.b.value_or(info.b), dt,
                                         config.problem.t_end.value_or(14.0));
  } else if (config.problem.id == "stiff") {
    problem = ode::problems::stiff_cosine(dt, config.problem.t_end.value_or(1.0));
  } else {
    problem = ode::problems::exponential(dt, config.problem.t_end.value_or(1.0));
  }
  return [problem, scheme]() { return ode::make_ode_stepper(scheme, problem); };
}

}  // namespace abcheck
