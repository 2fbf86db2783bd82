#include "persearch/planner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "persearch/rng.hpp"

namespace persearch {

namespace {

// Fixed stream tags so the planner's sub-draws stay decorrelated while the
// whole plan remains a pure function of the master seed.
constexpr std::uint64_t kSampleStream = 101;
constexpr std::uint64_t kTourStream = 202;
constexpr std::uint64_t kRandomCellsStream = 303;
constexpr std::uint64_t kRandomWaitsStream = 304;

}  // namespace

PlanningProblem make_problem(OccupancyMap map, RateGrid grid, Vec2 help_position,
                             PlannerConfig config) {
  map.validate();
  if (config.n < 1) throw std::invalid_argument("config.n must be at least 1");
  if (!(config.dt > 0.0) || !(config.t_max >= config.dt))
    throw std::invalid_argument("need 0 < dt <= t_max");
  const CellIndex cell = map.cell_at(help_position);
  if (!map.is_free(cell)) throw std::invalid_argument("help location must be a free map cell");
  if (!grid.spec().contains(grid.spec().cell_at(help_position)))
    throw std::invalid_argument("help location must lie inside the rate grid");

  PlanningProblem p;
  p.help_location =
      Place{0, map.cell_center(cell), cell, grid.cell(grid.spec().cell_at(help_position)).rate_mean()};
  p.map = std::move(map);
  p.grid = std::move(grid);
  p.config = config;
  return p;
}

std::string to_string(const Strategy& s) {
  switch (s.kind) {
    case StrategyKind::Psbt: return "PSBT";
    case StrategyKind::Wait: return "W";
    case StrategyKind::NoWait: return "NW";
    case StrategyKind::GlobalMax: return "GM";
    case StrategyKind::GreedyClosest: return "GC";
    case StrategyKind::Random: return "RND";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  if (name == "PSBT") return {StrategyKind::Psbt};
  if (name == "W") return {StrategyKind::Wait};
  if (name == "NW") return {StrategyKind::NoWait};
  if (name == "GM") return {StrategyKind::GlobalMax};
  if (name == "GC") return {StrategyKind::GreedyClosest};
  if (name == "RND") return {StrategyKind::Random};
  throw std::invalid_argument("unknown strategy: " + name);
}

std::string to_string(MaskState m) {
  switch (m) {
    case MaskState::Skip: return "skip";
    case MaskState::Visit: return "visit";
    case MaskState::VisitWait: return "visit+wait";
  }
  return "?";
}

TourBuild build_tour_graph(const PlanningProblem& problem,
                           const std::vector<PlaceSample>& samples) {
  const PlannerConfig& cfg = problem.config;
  TourBuild out;
  out.graph.nodes.push_back(problem.help_location);

  const auto reachable = reachable_cells(problem.map, problem.help_location.cell);
  for (const PlaceSample& s : samples) {
    const CellIndex map_cell = problem.map.cell_at(s.position);
    const bool ok = problem.map.is_free(map_cell) && map_cell != problem.help_location.cell &&
                    reachable[static_cast<std::size_t>(problem.map.row_major(map_cell))] != 0;
    if (!ok) {
      out.dropped.push_back(s);
      continue;
    }
    const int id = static_cast<int>(out.graph.nodes.size());
    out.graph.nodes.push_back(Place{id, s.position, map_cell, s.rate_mean});
  }

  const std::size_t n = out.graph.nodes.size();
  out.graph.cost.assign(n, std::vector<double>(n, 0.0));
  out.graph.leg.assign(n, std::vector<PathGeometry>(n));
  out.graph.leg_raw.assign(n, std::vector<PathGeometry>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      PathGeometry raw = plan_path(problem.map, out.graph.nodes[i].position,
                                   out.graph.nodes[j].position, cfg.avg_speed);
      PathGeometry cut = truncate_at_goal(raw, out.graph.nodes[j].position, cfg.goal_offset);
      const double nu = cfg.avg_speed / cut.length + cfg.avg_speed / cfg.l_fail;
      out.graph.cost[i][j] = 1.0 / nu;
      out.graph.leg[i][j] = std::move(cut);
      out.graph.leg_raw[i][j] = std::move(raw);
    }
  }
  return out;
}

double tour_cost(const TourGraph& graph, const std::vector<int>& order) {
  double total = 0.0;
  int prev = 0;
  for (int node : order) {
    total += graph.cost[static_cast<std::size_t>(prev)][static_cast<std::size_t>(node)];
    prev = node;
  }
  return total;
}

namespace {

std::vector<int> order_crossover(const std::vector<int>& a, const std::vector<int>& b, Rng& rng) {
  const std::size_t n = a.size();
  std::size_t lo = static_cast<std::size_t>(rng.integer(n));
  std::size_t hi = static_cast<std::size_t>(rng.integer(n));
  if (lo > hi) std::swap(lo, hi);
  std::vector<int> child(n, -1);
  std::vector<bool> used(n + 2, false);
  for (std::size_t i = lo; i <= hi; ++i) {
    child[i] = a[i];
    used[static_cast<std::size_t>(a[i])] = true;
  }
  std::size_t fill = (hi + 1) % n;
  for (std::size_t step = 0; step < n; ++step) {
    const int gene = b[(hi + 1 + step) % n];
    if (used[static_cast<std::size_t>(gene)]) continue;
    child[fill] = gene;
    used[static_cast<std::size_t>(gene)] = true;
    fill = (fill + 1) % n;
  }
  return child;
}

}  // namespace

GaTrace solve_otsp_trace(const TourGraph& graph, const GaParams& ga, std::uint64_t seed) {
  const int n = static_cast<int>(graph.nodes.size()) - 1;
  GaTrace trace;
  if (n <= 0) return trace;

  std::vector<int> identity(static_cast<std::size_t>(n));
  std::iota(identity.begin(), identity.end(), 1);
  if (n <= 3) {  // tiny instances are cheaper to enumerate than to evolve
    std::vector<int> best = identity;
    double best_cost = tour_cost(graph, identity);
    std::vector<int> perm = identity;
    while (std::next_permutation(perm.begin(), perm.end())) {
      const double c = tour_cost(graph, perm);
      if (c < best_cost) {
        best_cost = c;
        best = perm;
      }
    }
    trace.order = best;
    trace.cost = best_cost;
    trace.best_history = {best_cost};
    return trace;
  }

  if (ga.population < 2 || ga.elitism < 0 || ga.elitism >= ga.population)
    throw std::invalid_argument("bad GA parameters");

  Rng rng(seed);
  using Individual = std::pair<double, std::vector<int>>;
  std::vector<Individual> pop;
  pop.reserve(static_cast<std::size_t>(ga.population));
  for (int i = 0; i < ga.population; ++i) {
    std::vector<int> perm = identity;
    for (std::size_t k = perm.size(); k > 1; --k)  // Fisher-Yates
      std::swap(perm[k - 1], perm[static_cast<std::size_t>(rng.integer(k))]);
    pop.emplace_back(tour_cost(graph, perm), std::move(perm));
  }

  const auto by_cost = [](const Individual& x, const Individual& y) { return x.first < y.first; };
  std::sort(pop.begin(), pop.end(), by_cost);

  for (int gen = 0; gen < ga.generations; ++gen) {
    std::vector<Individual> next(pop.begin(), pop.begin() + ga.elitism);
    while (static_cast<int>(next.size()) < ga.population) {
      const auto tournament = [&]() -> const std::vector<int>& {
        const auto i = static_cast<std::size_t>(rng.integer(pop.size()));
        const auto j = static_cast<std::size_t>(rng.integer(pop.size()));
        return pop[std::min(i, j)].second;  // pop is sorted, lower index wins
      };
      const std::vector<int>& p1 = tournament();
      const std::vector<int>& p2 = tournament();
      std::vector<int> child =
          rng.bernoulli(ga.crossover_rate) ? order_crossover(p1, p2, rng) : p1;
      if (rng.bernoulli(ga.mutation_rate)) {
        const auto i = static_cast<std::size_t>(rng.integer(child.size()));
        const auto j = static_cast<std::size_t>(rng.integer(child.size()));
        std::swap(child[i], child[j]);
      }
      next.emplace_back(tour_cost(graph, child), std::move(child));
    }
    pop = std::move(next);
    std::sort(pop.begin(), pop.end(), by_cost);
    trace.best_history.push_back(pop.front().first);
  }

  trace.order = pop.front().second;
  trace.cost = pop.front().first;
  return trace;
}

std::vector<int> solve_otsp(const TourGraph& graph, const GaParams& ga, std::uint64_t seed) {
  return solve_otsp_trace(graph, ga, seed).order;
}

namespace {

struct ActionCache {
  std::vector<StochasticAction> wait;                 // per node
  std::vector<std::vector<StochasticAction>> search;  // [from][to]
  std::vector<StochasticAction> home;                 // per node, node -> 0
  StochasticAction degenerate_home;
};

ActionCache build_action_cache(const PlanningProblem& problem, const TourGraph& graph) {
  const PlannerConfig& cfg = problem.config;
  const std::size_t n = graph.nodes.size();
  ActionCache cache;
  cache.wait.reserve(n);
  for (const Place& p : graph.nodes)
    cache.wait.push_back(
        make_wait(p, problem.grid, cfg.detection_radius, cfg.p_s_prime, cfg.max_wait));

  cache.search.assign(n, std::vector<StochasticAction>(n));
  cache.home.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const PathGeometry& cut = graph.leg[i][j];
      cache.search[i][j] =
          make_search(graph.nodes[i], graph.nodes[j], cut,
                      sweep_rates(cut, problem.grid, cfg.detection_radius, cfg.dt),
                      cfg.p_s_prime, cfg.l_fail);
    }
    if (i != 0) {
      const PathGeometry& raw = graph.leg_raw[i][0];
      cache.home[i] =
          make_return_home(graph.nodes[i], graph.nodes[0], raw,
                           sweep_rates(raw, problem.grid, cfg.detection_radius, cfg.dt),
                           cfg.p_s_prime, cfg.l_fail);
    }
  }
  cache.degenerate_home = make_degenerate_home(problem.help_location, cfg.dt);
  return cache;
}

bool all_actions_valid(const std::vector<StochasticAction>& children) {
  return std::all_of(children.begin(), children.end(),
                     [](const StochasticAction& a) { return a.valid; });
}

CandidatePlan scored_plan(const PlanningProblem& problem, std::vector<MaskState> mask,
                          std::vector<int> tour, std::vector<StochasticAction> children) {
  CandidatePlan plan;
  plan.mask = std::move(mask);
  plan.tour = std::move(tour);
  plan.tree = make_tree(std::move(children));
  plan.score = score(plan.tree, problem.config.dt, problem.config.t_max,
                     {problem.config.home_finding_counts});
  return plan;
}

}  // namespace

CandidatePlan wait_home_plan(const PlanningProblem& problem) {
  const PlannerConfig& cfg = problem.config;
  std::vector<StochasticAction> children;
  children.push_back(make_wait(problem.help_location, problem.grid, cfg.detection_radius,
                               cfg.p_s_prime, cfg.max_wait));
  children.push_back(make_degenerate_home(problem.help_location, cfg.dt));
  return scored_plan(problem, {}, {}, std::move(children));
}

EnumerationResult enumerate_candidates(const PlanningProblem& problem, const TourGraph& graph,
                                       const std::vector<int>& tour) {
  const ActionCache cache = build_action_cache(problem, graph);
  const std::size_t n = tour.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;

  EnumerationResult out;
  out.candidates.reserve(total + 1);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<MaskState> mask(n);
    std::size_t rem = code;
    for (std::size_t i = 0; i < n; ++i) {
      mask[i] = static_cast<MaskState>(rem % 3);
      rem /= 3;
    }

    std::vector<StochasticAction> children;
    int prev = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i] == MaskState::Skip) continue;
      const int node = tour[i];
      children.push_back(
          cache.search[static_cast<std::size_t>(prev)][static_cast<std::size_t>(node)]);
      if (mask[i] == MaskState::VisitWait)
        children.push_back(cache.wait[static_cast<std::size_t>(node)]);
      prev = node;
    }
    children.push_back(prev == 0 ? cache.degenerate_home
                                 : cache.home[static_cast<std::size_t>(prev)]);

    if (!all_actions_valid(children)) {
      out.excluded_invalid += 1;
      continue;
    }
    out.candidates.push_back(scored_plan(problem, std::move(mask), tour, std::move(children)));
  }

  // the one extra plan: stay and wait where help was requested
  std::vector<StochasticAction> children{cache.wait[0], cache.degenerate_home};
  if (all_actions_valid(children)) {
    out.candidates.push_back(
        scored_plan(problem, {}, {}, std::move(children)));
  } else {
    out.excluded_invalid += 1;
  }
  return out;
}

namespace {

// p_success first, then quicker expected success, then simpler trees.
bool plan_better(const CandidatePlan& a, const CandidatePlan& b) {
  if (a.score.final_success() != b.score.final_success())
    return a.score.final_success() > b.score.final_success();
  if (a.score.expected_time_to_success != b.score.expected_time_to_success)
    return a.score.expected_time_to_success < b.score.expected_time_to_success;
  return a.tree.children.size() < b.tree.children.size();
}

PlanResult finish(const PlanningProblem& problem, PlanResult result,
                  std::chrono::steady_clock::time_point t0) {
  (void)problem;
  result.planning_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

PlanResult plan_fixed_tree(const PlanningProblem& problem, const Strategy& strategy,
                           CandidatePlan plan, std::vector<std::string> warnings,
                           std::chrono::steady_clock::time_point t0) {
  PlanResult result;
  result.strategy = to_string(strategy);
  result.chosen = std::move(plan);
  result.candidates_scored = 1;
  result.warnings = std::move(warnings);
  result.all_scores.push_back({result.chosen.tree.label, result.chosen.score.final_success(),
                               result.chosen.score.expected_time_to_success});
  return finish(problem, std::move(result), t0);
}

// Common single-place itinerary: go there, wait, come home. Falls back to
// waiting at the help location when a leg violates the validity bound, the
// same way the sampled-tour strategies do.
PlanResult plan_single_place(const PlanningProblem& problem, const Strategy& strategy,
                             const Place& target, std::chrono::steady_clock::time_point t0) {
  const PlannerConfig& cfg = problem.config;
  PathGeometry raw =
      plan_path(problem.map, problem.help_location.position, target.position, cfg.avg_speed);
  PathGeometry cut = truncate_at_goal(raw, target.position, cfg.goal_offset);
  PathGeometry back =
      plan_path(problem.map, target.position, problem.help_location.position, cfg.avg_speed);

  std::vector<StochasticAction> children;
  children.push_back(make_search(problem.help_location, target, cut,
                                 sweep_rates(cut, problem.grid, cfg.detection_radius, cfg.dt),
                                 cfg.p_s_prime, cfg.l_fail));
  children.push_back(
      make_wait(target, problem.grid, cfg.detection_radius, cfg.p_s_prime, cfg.max_wait));
  children.push_back(make_return_home(target, problem.help_location, back,
                                      sweep_rates(back, problem.grid, cfg.detection_radius, cfg.dt),
                                      cfg.p_s_prime, cfg.l_fail));
  if (!all_actions_valid(children))
    return plan_fixed_tree(problem, strategy, wait_home_plan(problem),
                           {"route to the target cell produced an invalid action; waiting at "
                            "the help location"},
                           t0);
  return plan_fixed_tree(problem, strategy,
                         scored_plan(problem, {MaskState::VisitWait}, {1}, std::move(children)),
                         {}, t0);
}

PlanResult plan_global_max(const PlanningProblem& problem, const Strategy& strategy,
                           std::chrono::steady_clock::time_point t0) {
  const GridSpec& spec = problem.grid.spec();
  const auto reachable = reachable_cells(problem.map, problem.help_location.cell);
  double best_rate = -1.0;
  Place target;
  bool found = false;
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      const CellIndex c{x, y};
      const double rate = problem.grid.cell(c).rate_mean();
      if (rate <= best_rate) continue;
      const Vec2 pos = spec.cell_center(c);
      const CellIndex mc = problem.map.cell_at(pos);
      if (!problem.map.is_free(mc) || mc == problem.help_location.cell) continue;
      if (!reachable[static_cast<std::size_t>(problem.map.row_major(mc))]) continue;
      best_rate = rate;
      target = Place{1, pos, mc, rate};
      found = true;
    }
  }
  if (!found)
    return plan_fixed_tree(problem, strategy, wait_home_plan(problem),
                           {"no reachable rate cell; waiting at the help location"}, t0);
  return plan_single_place(problem, strategy, target, t0);
}

PlanResult plan_greedy_closest(const PlanningProblem& problem, const Strategy& strategy,
                               std::chrono::steady_clock::time_point t0) {
  const GridSpec& spec = problem.grid.spec();
  struct Cell {
    double rate;
    CellIndex cell;
  };
  std::vector<Cell> cells;
  cells.reserve(static_cast<std::size_t>(spec.cell_count()));
  for (int y = 0; y < spec.height_cells; ++y)
    for (int x = 0; x < spec.width_cells; ++x)
      cells.push_back({problem.grid.cell({x, y}).rate_mean(), {x, y}});
  const auto by_rate = [&spec](const Cell& a, const Cell& b) {
    if (a.rate != b.rate) return a.rate > b.rate;
    return spec.row_major(a.cell) < spec.row_major(b.cell);
  };
  const std::size_t keep = std::min<std::size_t>(
      cells.size(), static_cast<std::size_t>(std::max(strategy.top_cells, 1)));
  std::partial_sort(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(keep), cells.end(),
                    by_rate);
  cells.resize(keep);

  const auto reachable = reachable_cells(problem.map, problem.help_location.cell);
  bool found = false;
  Place target;
  double best_len = std::numeric_limits<double>::infinity();
  for (const Cell& c : cells) {
    const Vec2 pos = spec.cell_center(c.cell);
    const CellIndex mc = problem.map.cell_at(pos);
    if (!problem.map.is_free(mc) || mc == problem.help_location.cell) continue;
    if (!reachable[static_cast<std::size_t>(problem.map.row_major(mc))]) continue;
    const PathGeometry path =
        plan_path(problem.map, problem.help_location.position, pos, problem.config.avg_speed);
    if (path.length < best_len) {
      best_len = path.length;
      target = Place{1, pos, mc, c.rate};
      found = true;
    }
  }
  if (!found)
    return plan_fixed_tree(problem, strategy, wait_home_plan(problem),
                           {"no reachable rate cell; waiting at the help location"}, t0);
  return plan_single_place(problem, strategy, target, t0);
}

std::vector<PlaceSample> random_places(const PlanningProblem& problem) {
  const PlannerConfig& cfg = problem.config;
  const auto reachable = reachable_cells(problem.map, problem.help_location.cell);
  std::vector<CellIndex> pool;
  for (int y = 0; y < problem.map.height; ++y) {
    for (int x = 0; x < problem.map.width; ++x) {
      const CellIndex c{x, y};
      if (!problem.map.is_free(c) || c == problem.help_location.cell) continue;
      if (!reachable[static_cast<std::size_t>(problem.map.row_major(c))]) continue;
      pool.push_back(c);
    }
  }
  Rng rng(mix_seed(cfg.seed, kRandomCellsStream));
  std::vector<PlaceSample> kept;
  while (static_cast<int>(kept.size()) < cfg.n && !pool.empty()) {
    const auto pick = static_cast<std::size_t>(rng.integer(pool.size()));
    const CellIndex c = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    const Vec2 pos = problem.map.cell_center(c);
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](const PlaceSample& k) {
      return distance(k.position, pos) < cfg.min_separation;
    });
    if (!clear) continue;  // rates are ignored, so first draw wins
    const CellIndex gc = problem.grid.spec().cell_at(pos);
    const double rate =
        problem.grid.spec().contains(gc) ? problem.grid.cell(gc).rate_mean() : 0.0;
    kept.push_back({c, pos, rate});
  }
  return kept;
}

PlanResult plan_sampled_tour(const PlanningProblem& problem, const Strategy& strategy,
                             std::chrono::steady_clock::time_point t0) {
  const PlannerConfig& cfg = problem.config;
  std::vector<std::string> warnings;

  std::vector<PlaceSample> samples;
  if (strategy.kind == StrategyKind::Random) {
    samples = random_places(problem);
  } else {
    samples = sample_places(problem.grid, cfg.n, cfg.min_separation, cfg.max_variance,
                            cfg.max_distance, problem.help_location.position,
                            mix_seed(cfg.seed, kSampleStream));
  }
  if (static_cast<int>(samples.size()) < cfg.n)
    warnings.push_back("only " + std::to_string(samples.size()) + " of " +
                       std::to_string(cfg.n) + " places were eligible");

  TourBuild built = build_tour_graph(problem, samples);
  for (const PlaceSample& d : built.dropped)
    warnings.push_back("dropped unreachable place at cell (" + std::to_string(d.cell.x) + ", " +
                       std::to_string(d.cell.y) + ")");

  const int n_places = static_cast<int>(built.graph.nodes.size()) - 1;
  if (n_places == 0) {
    warnings.push_back("no usable place samples; waiting at the help location");
    PlanResult r = plan_fixed_tree(problem, strategy, wait_home_plan(problem), warnings, t0);
    return r;
  }

  const std::vector<int> tour = solve_otsp(built.graph, cfg.ga, mix_seed(cfg.seed, kTourStream));

  if (strategy.kind == StrategyKind::Psbt) {
    EnumerationResult en = enumerate_candidates(problem, built.graph, tour);
    if (en.candidates.empty()) {
      warnings.push_back("all candidates were invalid; waiting at the help location");
      return plan_fixed_tree(problem, strategy, wait_home_plan(problem), warnings, t0);
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < en.candidates.size(); ++i)
      if (plan_better(en.candidates[i], en.candidates[best])) best = i;

    PlanResult result;
    result.strategy = to_string(strategy);
    result.candidates_scored = static_cast<int>(en.candidates.size());
    result.excluded_invalid = en.excluded_invalid;
    result.warnings = std::move(warnings);
    result.all_scores.reserve(en.candidates.size());
    for (const CandidatePlan& c : en.candidates)
      result.all_scores.push_back(
          {c.tree.label, c.score.final_success(), c.score.expected_time_to_success});
    result.chosen = std::move(en.candidates[best]);
    return finish(problem, std::move(result), t0);
  }

  // NW and RND: one fixed mask over the tour.
  const ActionCache cache = build_action_cache(problem, built.graph);
  Rng wait_rng(mix_seed(cfg.seed, kRandomWaitsStream));
  std::vector<MaskState> mask(tour.size());
  std::vector<StochasticAction> children;
  int prev = 0;
  for (std::size_t i = 0; i < tour.size(); ++i) {
    const int node = tour[i];
    const bool wait = strategy.kind == StrategyKind::Random && wait_rng.bernoulli(0.5);
    mask[i] = wait ? MaskState::VisitWait : MaskState::Visit;
    children.push_back(
        cache.search[static_cast<std::size_t>(prev)][static_cast<std::size_t>(node)]);
    if (wait) children.push_back(cache.wait[static_cast<std::size_t>(node)]);
    prev = node;
  }
  children.push_back(cache.home[static_cast<std::size_t>(prev)]);
  if (!all_actions_valid(children)) {
    warnings.push_back("tour produced an invalid action; waiting at the help location");
    return plan_fixed_tree(problem, strategy, wait_home_plan(problem), warnings, t0);
  }
  return plan_fixed_tree(problem, strategy,
                         scored_plan(problem, std::move(mask), tour, std::move(children)),
                         warnings, t0);
}

}  // namespace

PlanResult plan_strategy(const PlanningProblem& problem, const Strategy& strategy) {
  const auto t0 = std::chrono::steady_clock::now();
  switch (strategy.kind) {
    case StrategyKind::Psbt:
    case StrategyKind::NoWait:
    case StrategyKind::Random:
      return plan_sampled_tour(problem, strategy, t0);
    case StrategyKind::Wait:
      return plan_fixed_tree(problem, strategy, wait_home_plan(problem), {}, t0);
    case StrategyKind::GlobalMax:
      return plan_global_max(problem, strategy, t0);
    case StrategyKind::GreedyClosest:
      return plan_greedy_closest(problem, strategy, t0);
  }
  throw std::logic_error("unreachable strategy kind");
}

PlanResult plan_psbt(const PlanningProblem& problem) {
  return plan_strategy(problem, {StrategyKind::Psbt});
}

}  // namespace persearch
