#include "persearch/sbt.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace persearch {

SearchTree make_tree(std::vector<StochasticAction> children) {
  SearchTree tree;
  tree.children = std::move(children);
  std::string label;
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i) label += ",";
    label += tree.children[i].label();
  }
  tree.label = std::move(label);
  validate_tree(tree);
  return tree;
}

void validate_tree(const SearchTree& tree) {
  if (tree.children.empty()) throw std::invalid_argument("tree needs at least one child");
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    const StochasticAction& a = tree.children[i];
    if (!(a.deadline > 0.0)) throw std::invalid_argument("child deadline must be positive");
    if (!a.valid)
      throw std::invalid_argument(
          "tree contains an invalid action (a search leg accrues more success probability than "
          "its navigation-failure envelope allows)");
    const bool is_home = a.kind == ActionKind::ReturnHome;
    const bool is_last = i + 1 == tree.children.size();
    if (is_home != is_last)
      throw std::invalid_argument("exactly one return-home child, in last position");
  }
}

MarkovModel decompose(const SearchTree& tree, double dt, const SbtOptions& opts) {
  validate_tree(tree);
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  for (const StochasticAction& a : tree.children)
    if (dt > a.deadline + 1e-9)
      throw std::invalid_argument("dt must not exceed the smallest deadline");

  MarkovModel m;
  m.dt = dt;
  const int n = static_cast<int>(tree.children.size());
  m.child_offset.resize(static_cast<std::size_t>(n));
  m.child_steps.resize(static_cast<std::size_t>(n));
  int total = 0;
  for (int i = 0; i < n; ++i) {
    m.child_offset[static_cast<std::size_t>(i)] = total;
    const int k = chain_steps(tree.children[static_cast<std::size_t>(i)].deadline, dt);
    m.child_steps[static_cast<std::size_t>(i)] = k;
    total += k;
  }
  if (total > 5'000'000) throw std::length_error("chain would need too many age states");
  m.transient_count = total;
  m.p_success.resize(static_cast<std::size_t>(total));
  m.p_navfail.resize(static_cast<std::size_t>(total));
  m.p_continue.resize(static_cast<std::size_t>(total));

  for (int i = 0; i < n; ++i) {
    const StochasticAction& a = tree.children[static_cast<std::size_t>(i)];
    const bool suppress_success = a.kind == ActionKind::ReturnHome && !opts.home_finding_counts;
    for (int k = 0; k < m.child_steps[static_cast<std::size_t>(i)]; ++k) {
      const double exposure = step_exposure(a.deadline, dt, k);
      const double mu = suppress_success ? 0.0 : a.profile.at(k * dt);
      const double ps = -std::expm1(-mu * exposure);
      const double pn = (1.0 - ps) * -std::expm1(-a.nav_fail_rate * exposure);
      const auto s = static_cast<std::size_t>(m.child_offset[static_cast<std::size_t>(i)] + k);
      m.p_success[s] = ps;
      m.p_navfail[s] = pn;
      m.p_continue[s] = 1.0 - ps - pn;
    }
  }
  return m;
}

TreeScore transient(const MarkovModel& model, double t_max) {
  if (!(t_max >= model.dt)) throw std::invalid_argument("t_max must cover at least one step");
  const int n = model.n_children();
  for (int s = 0; s < model.transient_count; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const double row = model.p_success[i] + model.p_navfail[i] + model.p_continue[i];
    if (std::abs(row - 1.0) > 1e-9) throw std::logic_error("chain row does not sum to one");
  }

  std::vector<double> pi(static_cast<std::size_t>(model.total_states()), 0.0);
  std::vector<double> next(pi.size(), 0.0);
  pi[0] = 1.0;

  const int steps = chain_steps(t_max, model.dt);
  TreeScore out;
  out.dt = model.dt;
  out.p_success.assign(static_cast<std::size_t>(steps) + 1, 0.0);
  out.p_fail.assign(static_cast<std::size_t>(steps) + 1, 0.0);

  for (int j = 1; j <= steps; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    // absorbing masses carry over
    for (int s = model.transient_count; s < model.total_states(); ++s)
      next[static_cast<std::size_t>(s)] = pi[static_cast<std::size_t>(s)];
    for (int i = 0; i < n; ++i) {
      const int offset = model.child_offset[static_cast<std::size_t>(i)];
      const int k_max = model.child_steps[static_cast<std::size_t>(i)];
      const int onward = (i + 1 < n) ? model.child_offset[static_cast<std::size_t>(i + 1)]
                                     : model.failure_state();
      for (int k = 0; k < k_max; ++k) {
        const auto s = static_cast<std::size_t>(offset + k);
        const double mass = pi[s];
        if (mass == 0.0) continue;
        next[static_cast<std::size_t>(model.success_state(i))] += mass * model.p_success[s];
        next[static_cast<std::size_t>(onward)] += mass * model.p_navfail[s];
        const int cont = (k + 1 < k_max) ? offset + k + 1 : onward;
        next[static_cast<std::size_t>(cont)] += mass * model.p_continue[s];
      }
    }
    pi.swap(next);
    const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
    if (std::abs(total - 1.0) > 1e-9) throw std::logic_error("chain mass not conserved");

    double succ = 0.0;
    for (int i = 0; i < n; ++i) succ += pi[static_cast<std::size_t>(model.success_state(i))];
    out.p_success[static_cast<std::size_t>(j)] = succ;
    out.p_fail[static_cast<std::size_t>(j)] = pi[static_cast<std::size_t>(model.failure_state())];
  }

  out.success_by_child.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out.success_by_child[static_cast<std::size_t>(i)] =
        pi[static_cast<std::size_t>(model.success_state(i))];

  const double total_succ = out.p_success.back();
  if (total_succ > 0.0) {
    double acc = 0.0;
    for (std::size_t j = 1; j < out.p_success.size(); ++j)
      acc += static_cast<double>(j) * model.dt * (out.p_success[j] - out.p_success[j - 1]);
    out.expected_time_to_success = acc / total_succ;
  } else {
    out.expected_time_to_success = std::numeric_limits<double>::infinity();
  }
  return out;
}

void write_score_csv(const TreeScore& score, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t_s,p_success,p_fail\n";
  char buf[128];
  for (std::size_t j = 0; j < score.p_success.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f,%.9f\n", static_cast<double>(j) * score.dt,
                  score.p_success[j], score.p_fail[j]);
    out << buf;
  }
}

}  // namespace persearch
