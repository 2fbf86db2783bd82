// Command line front end: learn a rate grid from detections, synthesize a
// search plan, or run the Monte Carlo strategy comparison.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "persearch/experiment.hpp"

namespace {

int run(int argc, char** argv) {
  CLI::App app{"person-search planning over learned people-occurrence rates"};
  app.require_subcommand(1);

  persearch::TrainArgs train;
  CLI::App* cmd_train = app.add_subcommand("train", "update a rate grid from a detections CSV");
  cmd_train->add_option("--detections", train.detections_csv, "detections CSV")->required();
  cmd_train->add_option("--map", train.map_file, "occupancy map (.json or .pgm)")->required();
  cmd_train->add_option("--map-cell-size", train.map_cell_size, "meters per PGM pixel");
  cmd_train->add_option("--free-threshold", train.map_free_threshold, "PGM free threshold");
  cmd_train->add_option("--grid-in", train.grid_in, "existing grid to warm start from");
  cmd_train->add_option("--grid-out", train.grid_out, "where to write the grid")->required();
  cmd_train->add_option("--dt", train.dt, "observation window seconds");
  cmd_train->add_option("--radius", train.detection_radius, "detection disc radius");

  std::string config_path;
  CLI::App* cmd_plan = app.add_subcommand("plan", "synthesize a plan for one strategy");
  cmd_plan->add_option("config", config_path, "experiment config JSON")->required();
  CLI::App* cmd_eval = app.add_subcommand("evaluate", "run the strategy comparison");
  cmd_eval->add_option("config", config_path, "experiment config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // bad invocation is a config error
  }

  try {
    if (cmd_train->parsed()) {
      const persearch::TrainReport r = persearch::cmd_train(train);
      std::printf("windows=%d detections=%d skipped_outside=%d\n", r.windows, r.detections,
                  r.skipped_outside);
      std::printf("total_alpha=%.3f total_beta=%.3f max_rate=%.6f\n", r.total_alpha, r.total_beta,
                  r.max_rate);
      std::printf("grid written to %s\n", train.grid_out.c_str());
    } else if (cmd_plan->parsed()) {
      const persearch::ExperimentConfig cfg = persearch::load_config(config_path);
      const persearch::PlanArtifacts art = persearch::cmd_plan(cfg);
      const auto& score = art.result.chosen.score;
      std::printf("strategy=%s label=\"%s\"\n", art.result.strategy.c_str(),
                  art.result.chosen.tree.label.c_str());
      std::printf("p_success(t_max)=%.4f expected_time_to_success=%.2fs\n",
                  score.final_success(), score.expected_time_to_success);
      std::printf("candidates_scored=%d excluded_invalid=%d planning_time=%.3fs\n",
                  art.result.candidates_scored, art.result.excluded_invalid,
                  art.result.planning_time_s);
      for (const std::string& w : art.result.warnings)
        std::printf("warning: %s\n", w.c_str());
      std::printf("plan written to %s\n", art.plan_json.c_str());
    } else {
      const persearch::ExperimentConfig cfg = persearch::load_config(config_path);
      const persearch::EvaluateArtifacts art = persearch::cmd_evaluate(cfg);
      std::printf("%-6s %8s %10s %12s %12s %12s\n", "name", "P", "t_r_mean", "t_r_std",
                  "mu_T_inv", "p_s_T");
      for (const auto& s : art.report.strategies) {
        std::printf("%-6s %8.4f %10.2f %12.2f %12.2f %12.4f\n", s.name.c_str(), s.success_rate,
                    s.mean_t_return, s.std_t_return,
                    s.plan.chosen.score.expected_time_to_success,
                    s.plan.chosen.score.final_success());
      }
      std::printf("results written to %s\n", art.summary_csv.c_str());
    }
  } catch (const persearch::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const persearch::InputError& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
