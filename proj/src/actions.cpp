#include "persearch/actions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace persearch {

std::string to_string(ActionKind k) {
  switch (k) {
    case ActionKind::Wait: return "wait";
    case ActionKind::SearchPath: return "search";
    case ActionKind::ReturnHome: return "home";
  }
  return "?";
}

std::string StochasticAction::label() const {
  switch (kind) {
    case ActionKind::Wait: return "W" + std::to_string(place_to);
    case ActionKind::SearchPath:
      return "S" + std::to_string(place_from) + ">" + std::to_string(place_to);
    case ActionKind::ReturnHome: return "Home";
  }
  return "?";
}

double SuccessProfile::at(double t) const {
  if (times.empty()) return 0.0;
  // last sample with times[i] <= t
  auto it = std::upper_bound(times.begin(), times.end(), t);
  if (it == times.begin()) return rates.front();
  return rates[static_cast<std::size_t>(it - times.begin()) - 1];
}

double SuccessProfile::integral(double t) const {
  if (times.empty() || t <= 0.0) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double seg_end = (i + 1 < times.size()) ? std::min(times[i + 1], t) : t;
    if (seg_end <= times[i]) break;
    acc += rates[i] * (seg_end - times[i]);
    if (seg_end == t) break;
  }
  return acc;
}

bool SuccessProfile::all_zero() const {
  return std::all_of(rates.begin(), rates.end(),
                     [](double r) { return r <= kNegligibleRate; });
}

namespace {

void check_p_s_prime(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw std::invalid_argument("p_s_prime must lie in (0, 1)");
}

SuccessProfile profile_from_sweep(const std::vector<SweepSample>& sweep) {
  SuccessProfile p;
  p.times.reserve(sweep.size());
  p.rates.reserve(sweep.size());
  for (const SweepSample& s : sweep) {
    p.times.push_back(s.t);
    p.rates.push_back(s.rate);
  }
  if (p.times.empty() || p.times.front() != 0.0)
    throw std::invalid_argument("sweep must start at t = 0");
  return p;
}

// Shared by make_search and make_return_home: everything except the
// failure-rate semantics.
StochasticAction traversal_action(ActionKind kind, const Place& from, const Place& to,
                                  const PathGeometry& path, const std::vector<SweepSample>& sweep,
                                  double p_s_prime, double l_fail) {
  check_p_s_prime(p_s_prime);
  if (!(l_fail > 0.0)) throw std::invalid_argument("l_fail must be positive");
  if (!(path.length > 0.0)) throw std::invalid_argument("traversal needs a nonzero path");

  StochasticAction a;
  a.kind = kind;
  a.place_from = from.id;
  a.place_to = to.id;
  a.path = path;
  a.anchor = path.waypoints.front();
  a.profile = profile_from_sweep(sweep);
  a.deadline = path.duration();
  a.nav_fail_rate = path.avg_speed / l_fail;

  // Earliest moment any single profile sample, held constant, would reach
  // p_s_prime; its reciprocal summarises the whole sweep as one rate.
  const double log_term = -std::log1p(-p_s_prime);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.profile.times.size(); ++i) {
    const double r = a.profile.rates[i];
    if (r <= kNegligibleRate) continue;
    best = std::min(best, a.profile.times[i] + log_term / r);
  }
  a.success_rate = std::isinf(best) ? 0.0 : 1.0 / best;

  a.failure_rate = path.avg_speed / path.length + path.avg_speed / l_fail;
  a.valid = check_total_probability(a);
  return a;
}

}  // namespace

StochasticAction make_wait(const Place& place, const RateGrid& grid, double disc_radius,
                           double p_s_prime, double max_wait) {
  check_p_s_prime(p_s_prime);
  if (!(disc_radius > 0.0) || !(max_wait > 0.0))
    throw std::invalid_argument("disc_radius and max_wait must be positive");

  StochasticAction a;
  a.kind = ActionKind::Wait;
  a.place_from = place.id;
  a.place_to = place.id;
  a.anchor = place.position;

  const double mu = rate_in_disc(grid, {place.position, disc_radius}).rate;
  if (mu <= kNegligibleRate) {
    a.success_rate = 0.0;
    a.degenerate = true;
    a.deadline = max_wait;
    a.profile = {{0.0}, {0.0}};
  } else {
    a.success_rate = mu;
    a.deadline = std::min(-std::log1p(-p_s_prime) / mu, max_wait);
    a.profile = {{0.0}, {mu}};
  }
  a.failure_rate = 1.0 / a.deadline;
  a.valid = true;  // no navigation hazard, masses cannot overlap
  return a;
}

StochasticAction make_search(const Place& from, const Place& to, const PathGeometry& path,
                             const std::vector<SweepSample>& sweep, double p_s_prime,
                             double l_fail) {
  return traversal_action(ActionKind::SearchPath, from, to, path, sweep, p_s_prime, l_fail);
}

StochasticAction make_return_home(const Place& from, const Place& home, const PathGeometry& path,
                                  const std::vector<SweepSample>& sweep, double p_s_prime,
                                  double l_fail) {
  StochasticAction a =
      traversal_action(ActionKind::ReturnHome, from, home, path, sweep, p_s_prime, l_fail);
  // Completing the traversal ends the episode, so only the navigation hazard
  // counts as this action "failing early"; the pace summary nu is just the
  // nav hazard plus nothing else once home.
  a.failure_rate = a.nav_fail_rate > 0.0 ? a.nav_fail_rate : 1.0 / a.deadline;
  return a;
}

StochasticAction make_degenerate_home(const Place& home, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  StochasticAction a;
  a.kind = ActionKind::ReturnHome;
  a.place_from = home.id;
  a.place_to = home.id;
  a.anchor = home.position;
  a.deadline = dt;
  a.failure_rate = 1.0 / dt;
  a.profile = {{0.0}, {0.0}};
  a.degenerate = true;
  a.path.waypoints = {home.position};
  a.path.length = 0.0;
  return a;
}

double success_cdf(const StochasticAction& a, double t) {
  const double exposure = std::min(std::max(t, 0.0), a.deadline);
  return -std::expm1(-a.profile.integral(exposure));
}

double failure_probability(const StochasticAction& a, double t) {
  if (t <= 0.0) return 0.0;
  switch (a.kind) {
    case ActionKind::Wait:
      // Gives up at the deadline with whatever survival mass is left.
      return t < a.deadline ? 0.0 : std::exp(-a.profile.integral(a.deadline));
    case ActionKind::SearchPath: {
      // Navigation hazard up front; after the expected duration the action is
      // treated as spent, leaving 1 - p_s at 1/nu.
      const double horizon = 1.0 / a.failure_rate;
      if (t < horizon) return -std::expm1(-a.nav_fail_rate * t);
      return 1.0 - success_cdf(a, horizon);
    }
    case ActionKind::ReturnHome: {
      const double exposure = std::min(t, a.deadline);
      return -std::expm1(-a.nav_fail_rate * exposure);
    }
  }
  return 0.0;
}

bool check_total_probability(const StochasticAction& a) {
  if (a.kind == ActionKind::Wait || !(a.path.length > 0.0) || !(a.nav_fail_rate > 0.0))
    return true;
  const double l = a.path.length;
  const double l_fail = a.path.avg_speed / a.nav_fail_rate;
  const double bound = std::exp(-l / (l_fail + l));
  const double p_s_at_horizon = success_cdf(a, 1.0 / a.failure_rate);
  return p_s_at_horizon <= bound + 1e-12;
}

}  // namespace persearch
