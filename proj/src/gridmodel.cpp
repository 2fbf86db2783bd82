#include "persearch/gridmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "persearch/rng.hpp"

namespace persearch {

void GridSpec::validate() const {
  if (width_cells <= 0 || height_cells <= 0)
    throw std::invalid_argument("grid dimensions must be positive");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
}

bool operator==(const GridSpec& a, const GridSpec& b) {
  return a.width_cells == b.width_cells && a.height_cells == b.height_cells &&
         a.cell_size == b.cell_size && a.origin == b.origin;
}

RateGrid::RateGrid(GridSpec spec, int slice_id) : spec_(spec), slice_id_(slice_id) {
  spec_.validate();
  cells_.assign(static_cast<std::size_t>(spec_.cell_count()), RateCell{});
}

const RateCell& RateGrid::cell(CellIndex c) const {
  if (!spec_.contains(c)) throw std::out_of_range("cell index outside grid");
  return cells_[static_cast<std::size_t>(spec_.row_major(c))];
}

void RateGrid::set_cell(CellIndex c, RateCell value) {
  if (!spec_.contains(c)) throw std::out_of_range("cell index outside grid");
  if (value.alpha < 1.0 || value.beta < 1.0)
    throw std::invalid_argument("alpha and beta may not drop below the (1, 1) prior");
  cells_[static_cast<std::size_t>(spec_.row_major(c))] = value;
}

void RateGrid::update(Vec2 robot_pose, const std::map<CellIndex, int>& counts,
                      double disc_radius) {
  if (!(disc_radius > 0.0)) throw std::invalid_argument("disc_radius must be positive");
  for (const auto& [cell, count] : counts) {
    if (count < 0) throw std::invalid_argument("counts must be non-negative");
    if (!spec_.contains(cell)) throw std::out_of_range("count keyed outside grid");
  }
  for (CellIndex c : cells_in_disc(spec_, {robot_pose, disc_radius})) {
    RateCell& rc = cells_[static_cast<std::size_t>(spec_.row_major(c))];
    rc.beta += 1.0;
    if (auto it = counts.find(c); it != counts.end()) rc.alpha += it->second;
  }
}

std::vector<CellIndex> cells_in_disc(const GridSpec& spec, const DetectionDisc& disc) {
  std::vector<CellIndex> out;
  if (!(disc.radius > 0.0)) return out;
  const CellIndex lo = spec.cell_at({disc.center.x - disc.radius, disc.center.y - disc.radius});
  const CellIndex hi = spec.cell_at({disc.center.x + disc.radius, disc.center.y + disc.radius});
  for (int y = std::max(lo.y, 0); y <= std::min(hi.y, spec.height_cells - 1); ++y) {
    for (int x = std::max(lo.x, 0); x <= std::min(hi.x, spec.width_cells - 1); ++x) {
      const CellIndex c{x, y};
      if (distance(spec.cell_center(c), disc.center) <= disc.radius) out.push_back(c);
    }
  }
  return out;
}

DiscRate rate_in_disc(const RateGrid& grid, const DetectionDisc& disc) {
  DiscRate out;
  for (CellIndex c : cells_in_disc(grid.spec(), disc)) {
    out.rate += grid.cell(c).rate_mean();
    out.cells_covered += 1;
  }
  return out;
}

std::vector<PlaceSample> sample_places(const RateGrid& grid, int n, double min_separation,
                                       double max_variance, double max_distance, Vec2 from,
                                       std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  if (!(min_separation >= 0.0) || !(max_variance > 0.0) || !(max_distance > 0.0))
    throw std::invalid_argument("sampling thresholds must be positive");

  struct Entry {
    CellIndex cell;
    double rate;
  };
  std::vector<Entry> pool;  // row-major order keeps the roulette deterministic
  const GridSpec& spec = grid.spec();
  for (int y = 0; y < spec.height_cells; ++y) {
    for (int x = 0; x < spec.width_cells; ++x) {
      const CellIndex c{x, y};
      const RateCell& rc = grid.cell(c);
      if (rc.rate_variance() > max_variance) continue;
      if (distance(spec.cell_center(c), from) > max_distance) continue;
      pool.push_back({c, rc.rate_mean()});
    }
  }

  std::vector<PlaceSample> kept;
  Rng rng(seed);
  while (static_cast<int>(kept.size()) < n && !pool.empty()) {
    double total = 0.0;
    for (const Entry& e : pool) total += e.rate;
    if (!(total > 0.0)) break;
    const double target = rng.uniform() * total;
    std::size_t pick = pool.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      acc += pool[i].rate;
      if (target < acc) {
        pick = i;
        break;
      }
    }
    const Entry e = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));

    const Vec2 pos = spec.cell_center(e.cell);
    bool beats_all = true;
    std::vector<std::size_t> conflicts;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (distance(kept[i].position, pos) < min_separation) {
        conflicts.push_back(i);
        if (e.rate <= kept[i].rate_mean) beats_all = false;
      }
    }
    if (conflicts.empty()) {
      kept.push_back({e.cell, pos, e.rate});
    } else if (beats_all) {
      for (auto it = conflicts.rbegin(); it != conflicts.rend(); ++it)
        kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(*it));
      kept.push_back({e.cell, pos, e.rate});
    }
  }
  return kept;
}

std::vector<ArrivalEvent> simulate_arrivals(const RateGrid& grid, double horizon_s, double dt_s,
                                            std::uint64_t seed) {
  if (!(dt_s > 0.0)) throw std::invalid_argument("dt_s must be positive");
  if (horizon_s < dt_s) throw std::invalid_argument("horizon must cover at least one step");
  const auto steps = static_cast<long long>(std::floor(horizon_s / dt_s + 1e-9));
  const GridSpec& spec = grid.spec();
  Rng rng(seed);
  std::vector<ArrivalEvent> events;
  for (long long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * dt_s;
    for (int y = 0; y < spec.height_cells; ++y) {
      for (int x = 0; x < spec.width_cells; ++x) {
        const CellIndex c{x, y};
        const int count = rng.poisson(grid.cell(c).rate_mean() * dt_s);
        if (count > 0) events.push_back({t, c, count});
      }
    }
  }
  return events;
}

namespace {

nlohmann::ordered_json spec_to_json(const GridSpec& s) {
  return {{"width_cells", s.width_cells},
          {"height_cells", s.height_cells},
          {"cell_size", s.cell_size},
          {"origin", {s.origin.x, s.origin.y}}};
}

GridSpec spec_from_json(const nlohmann::json& j) {
  GridSpec s;
  s.width_cells = j.at("width_cells").get<int>();
  s.height_cells = j.at("height_cells").get<int>();
  s.cell_size = j.at("cell_size").get<double>();
  s.origin = {j.at("origin").at(0).get<double>(), j.at("origin").at(1).get<double>()};
  s.validate();
  return s;
}

}  // namespace

void save_grid(const RateGrid& grid, const std::string& path) {
  nlohmann::ordered_json j;
  j["spec"] = spec_to_json(grid.spec());
  j["slice_id"] = grid.slice_id();
  auto cells = nlohmann::ordered_json::array();
  for (const RateCell& c : grid.cells()) cells.push_back({c.alpha, c.beta});
  j["cells"] = std::move(cells);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

RateGrid load_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  RateGrid grid(spec_from_json(j.at("spec")), j.at("slice_id").get<int>());
  const auto& cells = j.at("cells");
  if (static_cast<int>(cells.size()) != grid.spec().cell_count())
    throw std::runtime_error("cell array size does not match grid spec");
  for (int y = 0; y < grid.spec().height_cells; ++y) {
    for (int x = 0; x < grid.spec().width_cells; ++x) {
      const auto& c = cells.at(static_cast<std::size_t>(grid.spec().row_major({x, y})));
      grid.set_cell({x, y}, {c.at(0).get<double>(), c.at(1).get<double>()});
    }
  }
  return grid;
}

void write_events_csv(const std::vector<ArrivalEvent>& events, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "time_s,cell_x,cell_y,count\n";
  char buf[128];
  for (const ArrivalEvent& e : events) {
    std::snprintf(buf, sizeof(buf), "%.6f,%d,%d,%d\n", e.time_s, e.cell.x, e.cell.y, e.count);
    out << buf;
  }
}

}  // namespace persearch
