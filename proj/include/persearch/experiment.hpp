#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "persearch/sim.hpp"

namespace persearch {

// Exit code 2: the run request itself is bad.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exit code 3: an input artifact (map, grid, CSV) is malformed.
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string map_file;
  double map_cell_size{1.0};   // PGM maps carry no scale of their own
  int map_free_threshold{250};
  std::string grid_file;
  std::string out_dir{"out"};
  Vec2 help_location{0.0, 0.0};
  PlannerConfig params;
  std::string strategy{"PSBT"};           // cmd_plan
  std::vector<std::string> strategies;    // cmd_evaluate
  int runs{1000};
  std::uint64_t master_seed{1};
  double sim_l_fail{100.0};
  double person_dwell{0.0};
  bool abort_on_nav_fail{false};
  int threads{0};
  double curve_step_s{20.0};
  double curve_max_s{140.0};
  bool export_all_scores{false};
};

ExperimentConfig load_config(const std::string& path);  // throws ConfigError

OccupancyMap load_map_any(const std::string& path, double cell_size, int free_threshold);
PlanningProblem load_problem(const ExperimentConfig& cfg);

struct TrainArgs {
  std::string detections_csv;
  std::string map_file;
  double map_cell_size{1.0};
  int map_free_threshold{250};
  std::string grid_in;   // optional warm start
  std::string grid_out;
  double dt{1.0};
  double detection_radius{2.0};
};

struct TrainReport {
  int windows{0};
  int detections{0};
  int skipped_outside{0};  // person positions outside the grid
  double total_alpha{0.0};
  double total_beta{0.0};
  double max_rate{0.0};
};

TrainReport cmd_train(const TrainArgs& args);

struct PlanArtifacts {
  PlanResult result;
  std::string plan_json;
  std::string curve_csv;
  std::string meta_json;
  std::string scores_csv;  // empty unless export_all_scores
};

PlanArtifacts cmd_plan(const ExperimentConfig& cfg);

struct EvaluateArtifacts {
  SimReport report;
  std::string runs_csv;
  std::string summary_csv;
  std::string curves_csv;
  std::string meta_json;
};

EvaluateArtifacts cmd_evaluate(const ExperimentConfig& cfg);

}  // namespace persearch
