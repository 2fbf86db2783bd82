#include "persearch/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json.hpp"

namespace persearch {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

template <typename T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }

  ExperimentConfig cfg;
  try {
    const auto& map = j.at("map");
    if (map.is_string()) {
      cfg.map_file = map.get<std::string>();
    } else {
      cfg.map_file = map.at("file").get<std::string>();
      cfg.map_cell_size = field_or(map, "cell_size", cfg.map_cell_size);
      cfg.map_free_threshold = field_or(map, "free_threshold", cfg.map_free_threshold);
    }
    cfg.grid_file = j.at("grid").get<std::string>();
    cfg.help_location = {j.at("help_location").at(0).get<double>(),
                         j.at("help_location").at(1).get<double>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config missing required field: ") + e.what());
  }

  cfg.out_dir = field_or(j, "out_dir", cfg.out_dir);
  cfg.master_seed = field_or<std::uint64_t>(j, "master_seed", cfg.master_seed);
  cfg.runs = field_or(j, "runs", cfg.runs);
  cfg.strategy = field_or(j, "strategy", cfg.strategy);
  cfg.export_all_scores = field_or(j, "export_all_scores", cfg.export_all_scores);
  if (j.contains("strategies")) {
    try {
      cfg.strategies = j.at("strategies").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad strategies list: ") + e.what());
    }
  }

  PlannerConfig& p = cfg.params;
  if (j.contains("params")) {
    const auto& jp = j.at("params");
    p.n = field_or(jp, "n", p.n);
    p.detection_radius = field_or(jp, "detection_radius", p.detection_radius);
    p.p_s_prime = field_or(jp, "p_s_prime", p.p_s_prime);
    p.dt = field_or(jp, "dt", p.dt);
    p.t_max = field_or(jp, "t_max", p.t_max);
    p.l_fail = field_or(jp, "l_fail", p.l_fail);
    p.avg_speed = field_or(jp, "avg_speed", p.avg_speed);
    p.max_wait = field_or(jp, "max_wait", p.max_wait);
    p.goal_offset = field_or(jp, "goal_offset", p.goal_offset);
    p.min_separation = field_or(jp, "min_separation", p.min_separation);
    p.max_variance = field_or(jp, "max_variance", p.max_variance);
    p.max_distance = field_or(jp, "max_distance", p.max_distance);
    p.home_finding_counts = field_or(jp, "home_finding_counts", p.home_finding_counts);
    if (jp.contains("ga")) {
      const auto& jg = jp.at("ga");
      p.ga.population = field_or(jg, "population", p.ga.population);
      p.ga.generations = field_or(jg, "generations", p.ga.generations);
      p.ga.crossover_rate = field_or(jg, "crossover_rate", p.ga.crossover_rate);
      p.ga.mutation_rate = field_or(jg, "mutation_rate", p.ga.mutation_rate);
      p.ga.elitism = field_or(jg, "elitism", p.ga.elitism);
    }
  }
  p.seed = cfg.master_seed;

  if (j.contains("sim")) {
    const auto& js = j.at("sim");
    cfg.sim_l_fail = field_or(js, "l_fail", cfg.sim_l_fail);
    cfg.person_dwell = field_or(js, "person_dwell", cfg.person_dwell);
    cfg.abort_on_nav_fail = field_or(js, "abort_on_nav_fail", cfg.abort_on_nav_fail);
    cfg.threads = field_or(js, "threads", cfg.threads);
  }
  if (j.contains("curve")) {
    const auto& jc = j.at("curve");
    cfg.curve_step_s = field_or(jc, "step_s", cfg.curve_step_s);
    cfg.curve_max_s = field_or(jc, "max_s", cfg.curve_max_s);
  }

  if (cfg.runs < 1) throw ConfigError("runs must be at least 1");
  if (!(p.dt > 0.0) || !(p.t_max >= p.dt)) throw ConfigError("need 0 < dt <= t_max");
  if (p.n < 1) throw ConfigError("params.n must be at least 1");
  if (!(cfg.curve_step_s > 0.0) || !(cfg.curve_max_s >= cfg.curve_step_s))
    throw ConfigError("need 0 < curve.step_s <= curve.max_s");
  return cfg;
}

OccupancyMap load_map_any(const std::string& path, double cell_size, int free_threshold) {
  try {
    if (ends_with(path, ".pgm")) return load_map_pgm(path, cell_size, free_threshold);
    return load_map_json(path);
  } catch (const std::exception& e) {
    throw InputError(std::string("bad map file ") + path + ": " + e.what());
  }
}

PlanningProblem load_problem(const ExperimentConfig& cfg) {
  OccupancyMap map = load_map_any(cfg.map_file, cfg.map_cell_size, cfg.map_free_threshold);
  RateGrid grid;
  try {
    grid = load_grid(cfg.grid_file);
  } catch (const std::exception& e) {
    throw InputError(std::string("bad grid file ") + cfg.grid_file + ": " + e.what());
  }
  try {
    return make_problem(std::move(map), std::move(grid), cfg.help_location, cfg.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bad problem definition: ") + e.what());
  }
}

namespace {

struct DetectionRow {
  double time;
  Vec2 robot;
  bool has_person{false};
  Vec2 person;
};

std::vector<DetectionRow> read_detections(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read detections " + path);
  std::vector<DetectionRow> rows;
  std::string line;
  std::size_t lineno = 0;
  double prev_time = -std::numeric_limits<double>::infinity();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("time_s", 0) == 0) continue;  // header

    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    while (fields.size() < 5) fields.emplace_back();
    if (fields.size() > 5)
      throw InputError("detections line " + std::to_string(lineno) + ": too many fields");

    DetectionRow row;
    try {
      row.time = std::stod(fields[0]);
      row.robot = {std::stod(fields[1]), std::stod(fields[2])};
      const bool px = !fields[3].empty();
      const bool py = !fields[4].empty();
      if (px != py)
        throw InputError("detections line " + std::to_string(lineno) +
                         ": person needs both coordinates");
      if (px) {
        row.has_person = true;
        row.person = {std::stod(fields[3]), std::stod(fields[4])};
      }
    } catch (const InputError&) {
      throw;
    } catch (const std::exception&) {
      throw InputError("detections line " + std::to_string(lineno) + ": not numeric");
    }
    if (row.time < prev_time)
      throw InputError("detections line " + std::to_string(lineno) + ": time went backwards");
    prev_time = row.time;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TrainReport cmd_train(const TrainArgs& args) {
  if (!(args.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(args.detection_radius > 0.0)) throw ConfigError("detection_radius must be positive");

  OccupancyMap map = load_map_any(args.map_file, args.map_cell_size, args.map_free_threshold);
  RateGrid grid;
  if (!args.grid_in.empty()) {
    try {
      grid = load_grid(args.grid_in);
    } catch (const std::exception& e) {
      throw InputError(std::string("bad grid file ") + args.grid_in + ": " + e.what());
    }
  } else {
    grid = RateGrid(map.grid_spec());
  }

  const std::vector<DetectionRow> rows = read_detections(args.detections_csv);

  TrainReport report;
  const GridSpec& spec = grid.spec();
  std::size_t i = 0;
  while (i < rows.size()) {
    const auto window = static_cast<long long>(std::floor(rows[i].time / args.dt + 1e-9));
    const Vec2 pose = rows[i].robot;  // the window is observed from its first pose
    std::map<CellIndex, int> counts;
    std::size_t j = i;
    for (; j < rows.size(); ++j) {
      const auto w = static_cast<long long>(std::floor(rows[j].time / args.dt + 1e-9));
      if (w != window) break;
      if (!rows[j].has_person) continue;
      report.detections += 1;
      const CellIndex c = spec.cell_at(rows[j].person);
      if (!spec.contains(c)) {
        report.skipped_outside += 1;
        continue;
      }
      counts[c] += 1;
    }
    grid.update(pose, counts, args.detection_radius);
    report.windows += 1;
    i = j;
  }

  for (const RateCell& c : grid.cells()) {
    report.total_alpha += c.alpha;
    report.total_beta += c.beta;
    report.max_rate = std::max(report.max_rate, c.rate_mean());
  }
  grid.set_slice_id(grid.slice_id() + 1);
  save_grid(grid, args.grid_out);
  return report;
}

namespace {

ordered_json action_to_json(const StochasticAction& a) {
  ordered_json j;
  j["kind"] = to_string(a.kind);
  j["label"] = a.label();
  j["from"] = a.place_from;
  j["to"] = a.place_to;
  j["mu"] = a.success_rate;
  j["nu"] = a.failure_rate;
  j["deadline_s"] = a.deadline;
  j["nav_fail_rate"] = a.nav_fail_rate;
  j["degenerate"] = a.degenerate;
  if (!a.path.waypoints.empty() && a.path.length > 0.0) {
    ordered_json wp = ordered_json::array();
    for (const Vec2& v : a.path.waypoints) wp.push_back({v.x, v.y});
    j["path"] = {{"length", a.path.length}, {"avg_speed", a.path.avg_speed},
                 {"waypoints", std::move(wp)}};
  }
  return j;
}

ordered_json plan_to_json(const ExperimentConfig& cfg, const PlanResult& result,
                          const std::string& curve_ref) {
  const CandidatePlan& plan = result.chosen;
  ordered_json j;
  j["strategy"] = result.strategy;
  j["label"] = plan.tree.label;
  j["tour"] = plan.tour;
  ordered_json mask = ordered_json::array();
  for (MaskState m : plan.mask) mask.push_back(to_string(m));
  j["mask"] = std::move(mask);
  ordered_json actions = ordered_json::array();
  for (const StochasticAction& a : plan.tree.children) actions.push_back(action_to_json(a));
  j["actions"] = std::move(actions);
  j["metrics"] = {{"p_success_tmax", plan.score.final_success()},
                  {"p_fail_tmax", plan.score.p_fail.back()},
                  {"expected_time_to_success_s", plan.score.expected_time_to_success},
                  {"t_max_s", cfg.params.t_max},
                  {"candidates_scored", result.candidates_scored},
                  {"excluded_invalid", result.excluded_invalid}};
  j["p_success_curve_ref"] = curve_ref;
  return j;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Wall-clock timing and warnings go to a sidecar so the main artifacts stay
// byte-reproducible for one master seed.
ordered_json meta_json(const PlanResult& result) {
  ordered_json j;
  j["planning_time_s"] = result.planning_time_s;
  j["warnings"] = result.warnings;
  return j;
}

std::string format_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Planning rejections surface as ConfigError at the CLI boundary. The invalid
// action case gets a hint, because fixed-route strategies build their trees
// without the candidate filter and hit it on any route through unobserved or
// extremely hot cells.
std::string invalid_plan_message(const std::string& what) {
  if (what.find("invalid action") == std::string::npos) return what;
  return what +
         "; fixed-route strategies do not filter invalid legs, so check for unobserved "
         "or extremely hot rate cells along the route";
}

}  // namespace

PlanArtifacts cmd_plan(const ExperimentConfig& cfg) {
  PlanningProblem problem = load_problem(cfg);
  Strategy strategy;
  try {
    strategy = parse_strategy(cfg.strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  std::filesystem::create_directories(cfg.out_dir);
  PlanArtifacts art;
  try {
    art.result = plan_strategy(problem, strategy);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(invalid_plan_message(e.what()));
  }

  const std::string curve_name = "plan_curve.csv";
  art.curve_csv = cfg.out_dir + "/" + curve_name;
  write_score_csv(art.result.chosen.score, art.curve_csv);

  art.plan_json = cfg.out_dir + "/plan.json";
  write_text(art.plan_json, plan_to_json(cfg, art.result, curve_name).dump(2) + "\n");

  art.meta_json = cfg.out_dir + "/plan_meta.json";
  write_text(art.meta_json, meta_json(art.result).dump(2) + "\n");

  if (cfg.export_all_scores) {
    art.scores_csv = cfg.out_dir + "/candidate_scores.csv";
    std::string csv = "label,p_success_tmax,expected_time_to_success_s\n";
    for (const CandidateSummary& c : art.result.all_scores)
      csv += c.label + "," + format_double(c.p_success) + "," + format_double(c.expected_time) +
             "\n";
    write_text(art.scores_csv, csv);
  }
  return art;
}

EvaluateArtifacts cmd_evaluate(const ExperimentConfig& cfg) {
  PlanningProblem problem = load_problem(cfg);
  std::vector<Strategy> strategies;
  std::vector<std::string> names =
      cfg.strategies.empty() ? std::vector<std::string>{"PSBT", "W", "NW", "GM", "GC", "RND"}
                             : cfg.strategies;
  for (const std::string& name : names) {
    try {
      strategies.push_back(parse_strategy(name));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }

  SimConfig sim;
  sim.dt = cfg.params.dt;
  sim.detection_radius = cfg.params.detection_radius;
  sim.l_fail = cfg.sim_l_fail;
  sim.runs = cfg.runs;
  sim.seed = mix_seed(cfg.master_seed, 0x51ABULL);
  sim.person_dwell = cfg.person_dwell;
  sim.abort_on_nav_fail = cfg.abort_on_nav_fail;
  sim.home_finding_counts = cfg.params.home_finding_counts;
  sim.threads = cfg.threads;

  EvaluateArtifacts art;
  try {
    art.report = evaluate(problem, strategies, sim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(invalid_plan_message(e.what()));
  }

  std::filesystem::create_directories(cfg.out_dir);

  std::string runs_csv = "strategy,run_id,seed,success,t_r_s,failure_cause\n";
  for (const StrategyResult& s : art.report.strategies) {
    for (std::size_t r = 0; r < s.outcomes.size(); ++r) {
      const RunOutcome& o = s.outcomes[r];
      runs_csv += s.name + "," + std::to_string(r) + "," +
                  std::to_string(round_seed(sim.seed, static_cast<int>(r))) + "," +
                  (o.success ? "1" : "0") + "," + (o.success ? format_double(o.t_return) : "") +
                  "," + (o.success ? "" : to_string(o.cause)) + "\n";
    }
  }
  art.runs_csv = cfg.out_dir + "/runs.csv";
  write_text(art.runs_csv, runs_csv);

  std::string summary_csv =
      "strategy,runs,successes,P,t_r_mean_s,t_r_std_s,mu_T_inv_s,p_s_T_tmax\n";
  for (const StrategyResult& s : art.report.strategies) {
    summary_csv += s.name + "," + std::to_string(art.report.runs) + "," +
                   std::to_string(s.successes) + "," + format_double(s.success_rate) + "," +
                   (s.successes > 0 ? format_double(s.mean_t_return) : "") + "," +
                   (s.successes > 1 ? format_double(s.std_t_return) : "") + "," +
                   format_double(s.plan.chosen.score.expected_time_to_success) + "," +
                   format_double(s.plan.chosen.score.final_success()) + "\n";
  }
  art.summary_csv = cfg.out_dir + "/summary.csv";
  write_text(art.summary_csv, summary_csv);

  // model curves on the reporting grid, one row per strategy
  std::string curves_csv = "strategy";
  for (double t = cfg.curve_step_s; t <= cfg.curve_max_s + 1e-9; t += cfg.curve_step_s)
    curves_csv += ",p_s_" + std::to_string(static_cast<int>(std::llround(t)));
  curves_csv += "\n";
  for (const StrategyResult& s : art.report.strategies) {
    curves_csv += s.name;
    for (double t = cfg.curve_step_s; t <= cfg.curve_max_s + 1e-9; t += cfg.curve_step_s)
      curves_csv += "," + format_double(s.plan.chosen.score.p_success_at(
                              std::min(t, cfg.params.t_max)));
    curves_csv += "\n";
  }
  art.curves_csv = cfg.out_dir + "/curves.csv";
  write_text(art.curves_csv, curves_csv);

  ordered_json meta;
  meta["strategies"] = ordered_json::array();
  for (const StrategyResult& s : art.report.strategies) {
    ordered_json m;
    m["strategy"] = s.name;
    m["planning_time_s"] = s.plan.planning_time_s;
    m["warnings"] = s.plan.warnings;
    meta["strategies"].push_back(std::move(m));
  }
  art.meta_json = cfg.out_dir + "/evaluate_meta.json";
  write_text(art.meta_json, meta.dump(2) + "\n");
  return art;
}

}  // namespace persearch
