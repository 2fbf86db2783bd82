#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "persearch/sbt.hpp"

namespace persearch {

struct GaParams {
  int population{100};
  int generations{200};
  double crossover_rate{0.9};
  double mutation_rate{0.1};
  int elitism{2};
};

struct PlannerConfig {
  int n{6};                    // help places to sample
  double detection_radius{2.0};
  double p_s_prime{0.9};       // per-action success budget
  double dt{1.0};              // chain / sweep / simulation step
  double t_max{200.0};         // scoring horizon
  double l_fail{100.0};        // expected meters between navigation failures
  double avg_speed{0.5};
  double max_wait{300.0};
  double goal_offset{2.0};     // stop this short of a sampled place
  double min_separation{2.0};
  double max_variance{0.01};
  double max_distance{50.0};
  std::uint64_t seed{1};
  GaParams ga{};
  bool home_finding_counts{true};
};

struct PlanningProblem {
  OccupancyMap map;
  RateGrid grid;
  Place help_location;  // id 0
  PlannerConfig config;
};

// Validates that the help location is a free cell inside both grids.
PlanningProblem make_problem(OccupancyMap map, RateGrid grid, Vec2 help_position,
                             PlannerConfig config);

enum class StrategyKind { Psbt, Wait, NoWait, GlobalMax, GreedyClosest, Random };

struct Strategy {
  StrategyKind kind{StrategyKind::Psbt};
  int top_cells{50};  // GreedyClosest candidate pool size
};

std::string to_string(const Strategy& s);
Strategy parse_strategy(const std::string& name);  // throws std::invalid_argument

// Complete travel graph over the help location (node 0) and the sampled
// places. Edge costs are the expected search-leg durations 1/nu.
struct TourGraph {
  std::vector<Place> nodes;
  std::vector<std::vector<double>> cost;
  std::vector<std::vector<PathGeometry>> leg;      // truncated at the goal offset
  std::vector<std::vector<PathGeometry>> leg_raw;  // full, used for the home leg
};

struct TourBuild {
  TourGraph graph;
  std::vector<PlaceSample> dropped;  // unreachable samples
};

TourBuild build_tour_graph(const PlanningProblem& problem,
                           const std::vector<PlaceSample>& samples);

double tour_cost(const TourGraph& graph, const std::vector<int>& order);

// Open travelling-salesman order over nodes 1..N, starting implicitly at
// node 0. Genetic search: order crossover, swap mutation, elitism.
std::vector<int> solve_otsp(const TourGraph& graph, const GaParams& ga, std::uint64_t seed);

struct GaTrace {
  std::vector<int> order;
  double cost{0.0};
  std::vector<double> best_history;  // best cost per generation, non-increasing
};
GaTrace solve_otsp_trace(const TourGraph& graph, const GaParams& ga, std::uint64_t seed);

enum class MaskState { Skip, Visit, VisitWait };
std::string to_string(MaskState m);

struct CandidatePlan {
  std::vector<MaskState> mask;  // per tour position
  std::vector<int> tour;        // graph node ids in visit order
  SearchTree tree;
  TreeScore score;
};

struct EnumerationResult {
  std::vector<CandidatePlan> candidates;  // scored, only the valid ones
  int excluded_invalid{0};
};

// All 3^N per-place {skip, visit, visit+wait} assignments over the tour,
// plus the wait-at-the-help-location plan.
EnumerationResult enumerate_candidates(const PlanningProblem& problem, const TourGraph& graph,
                                       const std::vector<int>& tour);

struct CandidateSummary {
  std::string label;
  double p_success{0.0};
  double expected_time{0.0};
};

struct PlanResult {
  std::string strategy;
  CandidatePlan chosen;
  int candidates_scored{0};
  int excluded_invalid{0};
  double planning_time_s{0.0};
  std::vector<std::string> warnings;
  std::vector<CandidateSummary> all_scores;
};

// Just wait where help was requested, then give up.
CandidatePlan wait_home_plan(const PlanningProblem& problem);

PlanResult plan_psbt(const PlanningProblem& problem);
PlanResult plan_strategy(const PlanningProblem& problem, const Strategy& strategy);

}  // namespace persearch
