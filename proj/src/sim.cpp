#include "persearch/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

namespace persearch {

std::string to_string(FailureCause c) {
  switch (c) {
    case FailureCause::None: return "none";
    case FailureCause::Exhausted: return "exhausted";
    case FailureCause::Navigation: return "navigation";
  }
  return "?";
}

ExecutionProfile build_execution_profile(const SearchTree& tree, const RateGrid& grid,
                                         const OccupancyMap& map, const SimConfig& cfg) {
  validate_tree(tree);
  if (!(cfg.dt > 0.0) || !(cfg.detection_radius > 0.0) || !(cfg.l_fail > 0.0))
    throw std::invalid_argument("dt, detection_radius and l_fail must be positive");

  const StochasticAction& home_child = tree.children.back();
  const Vec2 home_pos =
      home_child.path.waypoints.empty() ? home_child.anchor : home_child.path.waypoints.back();
  const CellIndex home_cell = map.cell_at(home_pos);

  // Walking-home time per map cell, lazily filled; robots only ever stand on
  // path waypoint cells so this stays tiny.
  std::map<CellIndex, double> home_time;
  const auto walk_home = [&](Vec2 pos) {
    const CellIndex c = map.cell_at(pos);
    if (c == home_cell) return 0.0;
    if (auto it = home_time.find(c); it != home_time.end()) return it->second;
    const double t =
        plan_path(map, map.cell_center(c), map.cell_center(home_cell), home_child.path.avg_speed)
            .duration();
    home_time.emplace(c, t);
    return t;
  };

  ExecutionProfile profile;
  profile.dt = cfg.dt;
  profile.person_dwell = cfg.person_dwell;
  profile.abort_on_nav_fail = cfg.abort_on_nav_fail;
  profile.grid = &grid;
  profile.detection_radius = cfg.detection_radius;

  for (const StochasticAction& a : tree.children) {
    ExecutionProfile::ChildPlan child;
    child.moving = a.kind != ActionKind::Wait && a.path.length > 0.0;
    const double nav_rate = child.moving ? a.path.avg_speed / cfg.l_fail : 0.0;
    const bool success_counts =
        !(a.kind == ActionKind::ReturnHome && !cfg.home_finding_counts) && !a.degenerate;
    const int steps = chain_steps(a.deadline, cfg.dt);
    child.steps.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
      ExecutionProfile::Step step;
      step.exposure = step_exposure(a.deadline, cfg.dt, k);
      const Vec2 pos = child.moving
                           ? point_along(a.path, a.path.avg_speed * (k * cfg.dt))
                           : a.anchor;
      double mu = 0.0;
      if (success_counts) {
        mu = rate_in_disc(grid, {pos, cfg.detection_radius}).rate;
        if (mu <= kNegligibleRate) mu = 0.0;
      }
      step.mu = mu;
      step.p_success = -std::expm1(-mu * step.exposure);
      step.p_navfail = -std::expm1(-nav_rate * step.exposure);
      step.return_time = walk_home(pos);
      child.steps.push_back(step);
      profile.step_positions.push_back(pos);
    }
    profile.children.push_back(std::move(child));
  }
  return profile;
}

namespace {

RunOutcome run_instant(const ExecutionProfile& profile, std::uint64_t seed) {
  Rng rng(seed);
  long long tick = 0;
  const std::size_t n = profile.children.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& child = profile.children[i];
    bool lost_path = false;
    for (const auto& step : child.steps) {
      if (step.p_success > 0.0 && rng.uniform() < step.p_success) {
        RunOutcome out;
        out.success = true;
        out.t_find = static_cast<double>(tick) * profile.dt +
                     rng.truncated_exponential(step.mu, step.exposure);
        out.t_return = out.t_find + step.return_time;
        return out;
      }
      tick += 1;
      if (step.p_navfail > 0.0 && rng.uniform() < step.p_navfail) {
        lost_path = true;
        break;
      }
    }
    if (lost_path) {
      if (profile.abort_on_nav_fail || i + 1 == n)
        return {false, 0.0, 0.0, FailureCause::Navigation};
      continue;  // fall back to the next child at the next tick
    }
  }
  return {false, 0.0, 0.0, FailureCause::Exhausted};
}

// Dwell mode: people linger, so a tick can detect anyone who arrived in the
// recent window wherever the disc currently covers them. Arrival counts come
// from a counter-based stream keyed by (cell, absolute step), making the
// ground truth independent of how the robot moves.
RunOutcome run_dwell(const ExecutionProfile& profile, std::uint64_t seed) {
  const RateGrid& grid = *profile.grid;
  const GridSpec& spec = grid.spec();
  const auto window = static_cast<long long>(std::floor(profile.person_dwell / profile.dt + 1e-9));
  Rng rng(seed);
  const std::uint64_t arrivals_key = mix_seed(seed, 0xA11CE5ULL);

  const auto arrivals = [&](CellIndex c, long long step) {
    if (step < 0) return 0;
    const double rate = grid.cell(c).rate_mean();
    if (rate <= kNegligibleRate) return 0;
    const std::uint64_t cell_key =
        mix_seed(arrivals_key, static_cast<std::uint64_t>(spec.row_major(c)));
    Rng cell_rng(mix_seed(cell_key, static_cast<std::uint64_t>(step)));
    return cell_rng.poisson(rate * profile.dt);
  };

  long long tick = 0;
  std::size_t flat = 0;
  const std::size_t n = profile.children.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& child = profile.children[i];
    bool lost_path = false;
    for (const auto& step : child.steps) {
      const Vec2 pos = profile.step_positions[flat++];
      if (step.mu > 0.0) {
        for (CellIndex c : cells_in_disc(spec, {pos, profile.detection_radius})) {
          for (long long back = 0; back <= window; ++back) {
            if (arrivals(c, tick - back) > 0) {
              RunOutcome out;
              out.success = true;
              out.t_find = static_cast<double>(tick) * profile.dt + 0.5 * step.exposure;
              out.t_return = out.t_find + step.return_time;
              return out;
            }
          }
        }
      }
      tick += 1;
      if (step.p_navfail > 0.0 && rng.uniform() < step.p_navfail) {
        lost_path = true;
        break;
      }
    }
    if (lost_path) {
      if (profile.abort_on_nav_fail || i + 1 == n)
        return {false, 0.0, 0.0, FailureCause::Navigation};
      continue;
    }
  }
  return {false, 0.0, 0.0, FailureCause::Exhausted};
}

}  // namespace

RunOutcome run_once(const ExecutionProfile& profile, std::uint64_t seed) {
  return profile.person_dwell > 0.0 ? run_dwell(profile, seed) : run_instant(profile, seed);
}

std::vector<RunOutcome> run_batch(const ExecutionProfile& profile, int runs,
                                  std::uint64_t master_seed, int threads) {
  if (runs < 0) throw std::invalid_argument("runs must be non-negative");
  std::vector<RunOutcome> out(static_cast<std::size_t>(runs));
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(runs, 1));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (int r = w; r < runs; r += workers)
        out[static_cast<std::size_t>(r)] = run_once(profile, round_seed(master_seed, r));
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

SimReport evaluate(const PlanningProblem& problem, const std::vector<Strategy>& strategies,
                   const SimConfig& cfg) {
  SimReport report;
  report.runs = cfg.runs;
  for (const Strategy& s : strategies) {
    StrategyResult res;
    res.strategy = s;
    res.name = to_string(s);
    try {
      res.plan = plan_strategy(problem, s);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("strategy " + res.name + ": " + e.what());
    }
    const ExecutionProfile profile =
        build_execution_profile(res.plan.chosen.tree, problem.grid, problem.map, cfg);
    res.outcomes = run_batch(profile, cfg.runs, cfg.seed, cfg.threads);

    double sum = 0.0, sum_sq = 0.0;
    for (const RunOutcome& o : res.outcomes) {
      if (!o.success) continue;
      res.successes += 1;
      sum += o.t_return;
      sum_sq += o.t_return * o.t_return;
    }
    res.success_rate = cfg.runs > 0 ? static_cast<double>(res.successes) / cfg.runs : 0.0;
    if (res.successes > 0) res.mean_t_return = sum / res.successes;
    if (res.successes > 1) {
      const double var =
          (sum_sq - sum * sum / res.successes) / static_cast<double>(res.successes - 1);
      res.std_t_return = std::sqrt(std::max(var, 0.0));
    }
    report.strategies.push_back(std::move(res));
  }
  return report;
}

}  // namespace persearch
