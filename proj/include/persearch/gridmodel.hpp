#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "persearch/geometry.hpp"

namespace persearch {

// Cell layout shared by all rate grids: row-major, index = y * width + x,
// cell (x, y) spans [origin + (x, y) * cell, origin + (x+1, y+1) * cell).
struct GridSpec {
  int width_cells{0};
  int height_cells{0};
  double cell_size{1.0};
  Vec2 origin{0.0, 0.0};

  int cell_count() const { return width_cells * height_cells; }
  bool contains(CellIndex c) const {
    return c.x >= 0 && c.x < width_cells && c.y >= 0 && c.y < height_cells;
  }
  int row_major(CellIndex c) const { return c.y * width_cells + c.x; }
  Vec2 cell_center(CellIndex c) const {
    return {origin.x + (c.x + 0.5) * cell_size, origin.y + (c.y + 0.5) * cell_size};
  }
  CellIndex cell_at(Vec2 p) const {
    return {static_cast<int>(std::floor((p.x - origin.x) / cell_size)),
            static_cast<int>(std::floor((p.y - origin.y) / cell_size))};
  }
  void validate() const;  // throws std::invalid_argument
};

bool operator==(const GridSpec& a, const GridSpec& b);

// Gamma posterior over one cell's occurrence rate. alpha and beta never drop
// below the (1, 1) prior, so the mean is always strictly positive.
struct RateCell {
  double alpha{1.0};
  double beta{1.0};
  double rate_mean() const { return alpha / beta; }
  double rate_variance() const { return alpha / (beta * beta); }
};

struct DetectionDisc {
  Vec2 center{0.0, 0.0};
  double radius{0.0};
};

// Independent per-cell Gamma-Poisson model of where people appear.
class RateGrid {
 public:
  RateGrid() = default;
  explicit RateGrid(GridSpec spec, int slice_id = 0);

  const GridSpec& spec() const { return spec_; }
  int slice_id() const { return slice_id_; }
  void set_slice_id(int id) { slice_id_ = id; }

  const RateCell& cell(CellIndex c) const;
  const std::vector<RateCell>& cells() const { return cells_; }
  void set_cell(CellIndex c, RateCell value);  // synthetic setup; keeps alpha, beta >= 1

  // One observation window: every cell whose center lies inside the disc gets
  // beta += 1 and alpha += its count. Counts keyed outside the disc are
  // ignored; counts keyed outside the grid reject the whole update.
  void update(Vec2 robot_pose, const std::map<CellIndex, int>& counts, double disc_radius);

 private:
  GridSpec spec_{};
  int slice_id_{0};
  std::vector<RateCell> cells_;
};

// Cells whose centers lie within the disc (boundary inclusive).
std::vector<CellIndex> cells_in_disc(const GridSpec& spec, const DetectionDisc& disc);

struct DiscRate {
  double rate{0.0};      // sum of posterior rate means over covered cells
  int cells_covered{0};
};

DiscRate rate_in_disc(const RateGrid& grid, const DetectionDisc& disc);

// Candidate help location drawn from the rate field.
struct PlaceSample {
  CellIndex cell{};
  Vec2 position{};       // cell center
  double rate_mean{0.0};
};

// Rate-weighted roulette draw of up to n cells. Eligible cells have posterior
// variance <= max_variance and center within max_distance of `from`. Draws
// closer than min_separation to an already kept cell either replace it (when
// strictly higher-rate than every conflicting kept cell) or are discarded.
std::vector<PlaceSample> sample_places(const RateGrid& grid, int n, double min_separation,
                                       double max_variance, double max_distance, Vec2 from,
                                       std::uint64_t seed);

struct ArrivalEvent {
  double time_s{0.0};
  CellIndex cell{};
  int count{0};
};

// Ground-truth arrival stream: per step of length dt_s each cell emits a
// Poisson(rate * dt_s) count stamped with the step start time.
std::vector<ArrivalEvent> simulate_arrivals(const RateGrid& grid, double horizon_s, double dt_s,
                                            std::uint64_t seed);

// Snapshot round-trip (JSON) and event stream export (CSV).
void save_grid(const RateGrid& grid, const std::string& path);
RateGrid load_grid(const std::string& path);
void write_events_csv(const std::vector<ArrivalEvent>& events, const std::string& path);

}  // namespace persearch
