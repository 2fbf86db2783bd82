#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persearch/planner.hpp"
#include "persearch/rng.hpp"

namespace persearch {

struct SimConfig {
  double dt{1.0};
  double detection_radius{2.0};
  double l_fail{100.0};       // environment truth for navigation failures
  int runs{1000};
  std::uint64_t seed{1};
  double person_dwell{0.0};   // seconds a person lingers; 0 = instantaneous
  bool abort_on_nav_fail{false};
  bool home_finding_counts{true};
  int threads{0};             // 0 = hardware concurrency
};

enum class FailureCause { None, Exhausted, Navigation };
std::string to_string(FailureCause c);

struct RunOutcome {
  bool success{false};
  double t_find{0.0};    // seconds until someone was spotted
  double t_return{0.0};  // t_find plus the walk back to the help location
  FailureCause cause{FailureCause::None};
};

// Everything one episode needs, precomputed once per tree so that a batch of
// runs costs roughly one uniform draw per tick. Rates are re-derived from the
// grid and the action geometry; the chain's numbers are never consulted.
struct ExecutionProfile {
  struct Step {
    double exposure{0.0};
    double mu{0.0};
    double p_success{0.0};
    double p_navfail{0.0};   // conditional on not succeeding in this tick
    double return_time{0.0}; // walk home from this tick's position
  };
  struct ChildPlan {
    std::vector<Step> steps;
    bool moving{false};
  };
  std::vector<ChildPlan> children;
  double dt{1.0};
  double person_dwell{0.0};
  bool abort_on_nav_fail{false};

  // dwell mode needs the raw geometry to re-query coverage per tick
  std::vector<Vec2> step_positions;          // flattened, dwell mode only
  const RateGrid* grid{nullptr};
  double detection_radius{0.0};
};

ExecutionProfile build_execution_profile(const SearchTree& tree, const RateGrid& grid,
                                         const OccupancyMap& map, const SimConfig& cfg);

RunOutcome run_once(const ExecutionProfile& profile, std::uint64_t seed);

inline RunOutcome run_once(const SearchTree& tree, const RateGrid& grid, const OccupancyMap& map,
                           const SimConfig& cfg, std::uint64_t seed) {
  return run_once(build_execution_profile(tree, grid, map, cfg), seed);
}

std::vector<RunOutcome> run_batch(const ExecutionProfile& profile, int runs,
                                  std::uint64_t master_seed, int threads = 0);

// Per-round seed shared by every strategy, so that swapping the strategy
// list only permutes the result rows.
inline std::uint64_t round_seed(std::uint64_t master_seed, int round) {
  return mix_seed(master_seed, 0xE0000000ULL + static_cast<std::uint64_t>(round));
}

struct StrategyResult {
  Strategy strategy;
  std::string name;
  PlanResult plan;
  std::vector<RunOutcome> outcomes;  // indexed by round
  int successes{0};
  double success_rate{0.0};
  double mean_t_return{0.0};  // over successful runs
  double std_t_return{0.0};   // sample standard deviation
};

struct SimReport {
  int runs{0};
  std::vector<StrategyResult> strategies;
};

// Plans every strategy on the same problem, then runs the paired-seed
// episode batch for each.
SimReport evaluate(const PlanningProblem& problem, const std::vector<Strategy>& strategies,
                   const SimConfig& cfg);

}  // namespace persearch
