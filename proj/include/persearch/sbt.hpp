#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "persearch/actions.hpp"

namespace persearch {

// Fallback over stochastic actions, tried left to right; the last child is
// always the return-home leg.
struct SearchTree {
  std::vector<StochasticAction> children;
  std::string label;
};

SearchTree make_tree(std::vector<StochasticAction> children);
void validate_tree(const SearchTree& tree);  // throws std::invalid_argument

struct SbtOptions {
  // Whether a person found while heading home still counts as tree success.
  bool home_finding_counts{true};
};

// Number of wall-clock ticks of length dt an action with this deadline
// occupies. Shared with the simulator so both sides age identically.
inline int chain_steps(double deadline, double dt) {
  return std::max(1, static_cast<int>(std::ceil(deadline / dt - 1e-9)));
}

// Hazard exposure inside tick k; the last tick is usually partial.
inline double step_exposure(double deadline, double dt, int k) {
  return std::clamp(deadline - k * dt, 0.0, dt);
}

// Discrete-time absorbing chain over (child, age) states. Rows are stored as
// the three outgoing masses; targets are implicit in the fallback structure.
struct MarkovModel {
  double dt{1.0};
  std::vector<int> child_offset;  // first transient state of each child
  std::vector<int> child_steps;   // ticks each child occupies
  std::vector<double> p_success;  // per transient state, to the child's success sink
  std::vector<double> p_navfail;  // to the next child (or failure for the last)
  std::vector<double> p_continue; // to the next age state, routing onward at the deadline
  int transient_count{0};

  int n_children() const { return static_cast<int>(child_offset.size()); }
  int success_state(int child) const { return transient_count + child; }
  int failure_state() const { return transient_count + n_children(); }
  int total_states() const { return transient_count + n_children() + 1; }
};

MarkovModel decompose(const SearchTree& tree, double dt, const SbtOptions& opts = {});

// Success and failure mass per tick, plus the conditional mean time to
// success on the tick grid.
struct TreeScore {
  double dt{1.0};
  std::vector<double> p_success;  // index j is wall time j * dt
  std::vector<double> p_fail;
  std::vector<double> success_by_child;  // final mass per child
  double expected_time_to_success{0.0};  // infinity when success mass is zero

  double final_success() const { return p_success.back(); }
  double p_success_at(double t) const { return p_success[index_of(t)]; }
  double p_fail_at(double t) const { return p_fail[index_of(t)]; }

 private:
  std::size_t index_of(double t) const {
    const auto j = static_cast<long long>(std::floor(t / dt + 1e-9));
    return static_cast<std::size_t>(std::clamp<long long>(
        j, 0, static_cast<long long>(p_success.size()) - 1));
  }
};

TreeScore transient(const MarkovModel& model, double t_max);

inline TreeScore score(const SearchTree& tree, double dt, double t_max,
                       const SbtOptions& opts = {}) {
  return transient(decompose(tree, dt, opts), t_max);
}

void write_score_csv(const TreeScore& score, const std::string& path);

}  // namespace persearch
