#pragma once

#include <string>
#include <vector>

#include "persearch/geometry.hpp"
#include "persearch/gridmodel.hpp"
#include "persearch/navgrid.hpp"

namespace persearch {

// Rates below this are treated as zero when sizing deadlines, so that a
// practically-empty rate field cannot blow the wait horizon up to years.
inline constexpr double kNegligibleRate = 1e-12;

enum class ActionKind { Wait, SearchPath, ReturnHome };
std::string to_string(ActionKind k);

struct Place {
  int id{0};
  Vec2 position{0.0, 0.0};
  CellIndex cell{};
  double rate_mean{0.0};
};

// Left-continuous step function of the success rate over local action time.
struct SuccessProfile {
  std::vector<double> times;  // ascending, times.front() == 0
  std::vector<double> rates;

  double at(double t) const;        // rate of the step containing t
  double integral(double t) const;  // integral of the step function on [0, t]
  bool all_zero() const;
};

// One leaf of a search tree: succeeds at rate mu(t), runs out of time at
// `deadline` seconds, and (while moving) aborts at rate nav_fail_rate.
struct StochasticAction {
  ActionKind kind{ActionKind::Wait};
  int place_from{0};
  int place_to{0};
  double success_rate{0.0};   // mu, the tuning summary rate
  double failure_rate{0.0};   // nu = 1 / expected duration
  double deadline{0.0};       // local seconds until the action gives up
  double nav_fail_rate{0.0};  // hazard of losing the path; 0 while waiting
  SuccessProfile profile;
  PathGeometry path;          // empty while waiting
  Vec2 anchor{0.0, 0.0};      // disc center while waiting, path start otherwise
  bool degenerate{false};
  bool valid{true};           // total-probability bound satisfied

  std::string label() const;
};

// Waiting: the disc is static, so the success rate is flat and the deadline
// is sized so that the action succeeds with probability p_s_prime before it
// gives up (capped at max_wait seconds).
StochasticAction make_wait(const Place& place, const RateGrid& grid, double disc_radius,
                           double p_s_prime, double max_wait);

// Traversal: the disc sweeps the path, so the success rate is the sampled
// profile; mu summarises it by the earliest time any single sample would have
// delivered p_s_prime on its own. nu folds the traversal time together with
// the expected time lost to navigation failures over l_fail meters.
StochasticAction make_search(const Place& from, const Place& to, const PathGeometry& path,
                             const std::vector<SweepSample>& sweep, double p_s_prime,
                             double l_fail);

// Same mechanics as a search leg, but ending the episode: runs to the charger
// and only fails by losing the path.
StochasticAction make_return_home(const Place& from, const Place& home, const PathGeometry& path,
                                  const std::vector<SweepSample>& sweep, double p_s_prime,
                                  double l_fail);

// Return-home placeholder for trees that never leave the help location.
StochasticAction make_degenerate_home(const Place& home, double dt);

// Probability the action has succeeded by local time t.
double success_cdf(const StochasticAction& a, double t);

// Probability the action has failed by local time t (gave up or lost the
// path), holding constant once the action must have ended.
double failure_probability(const StochasticAction& a, double t);

// Success probability accrued by the expected duration 1/nu must not exceed
// exp(-l / (l_fail + l)); beyond that the success and failure masses could
// sum above one.
bool check_total_probability(const StochasticAction& a);

}  // namespace persearch
