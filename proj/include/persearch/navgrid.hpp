#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "persearch/geometry.hpp"
#include "persearch/gridmodel.hpp"

namespace persearch {

// Binary occupancy grid. Shares the cell layout convention of GridSpec with
// the map frame origin fixed at (0, 0).
struct OccupancyMap {
  int width{0};
  int height{0};
  double cell_size{1.0};
  std::vector<std::uint8_t> blocked;  // row-major, nonzero = blocked

  void validate() const;
  bool in_bounds(CellIndex c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  int row_major(CellIndex c) const { return c.y * width + c.x; }
  bool is_free(CellIndex c) const {
    return in_bounds(c) && blocked[static_cast<std::size_t>(row_major(c))] == 0;
  }
  Vec2 cell_center(CellIndex c) const {
    return {(c.x + 0.5) * cell_size, (c.y + 0.5) * cell_size};
  }
  CellIndex cell_at(Vec2 p) const {
    return {static_cast<int>(std::floor(p.x / cell_size)),
            static_cast<int>(std::floor(p.y / cell_size))};
  }
  GridSpec grid_spec() const { return {width, height, cell_size, {0.0, 0.0}}; }
};

OccupancyMap make_open_map(int width, int height, double cell_size);

struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Piecewise-linear robot trajectory traversed at constant speed.
struct PathGeometry {
  std::vector<Vec2> waypoints;
  double length{0.0};
  double avg_speed{0.5};
  double duration() const { return length / avg_speed; }
};

double polyline_length(const std::vector<Vec2>& pts);
Vec2 point_along(const PathGeometry& path, double arc);  // clamped to [0, length]

// 8-connected A* between cell centers; diagonal steps cost sqrt(2) * cell and
// are disallowed when either adjacent orthogonal cell is blocked (no corner
// cutting). Throws NoPathError when the goal is unreachable.
PathGeometry plan_path(const OccupancyMap& map, Vec2 from, Vec2 to, double avg_speed);

// Drops the path tail from the first waypoint within `offset` of `goal`,
// keeping at least the first segment. Used to stop in front of a person
// instead of on top of them.
PathGeometry truncate_at_goal(const PathGeometry& path, Vec2 goal, double offset);

// Cells reachable from `from` under the same connectivity as plan_path.
std::vector<std::uint8_t> reachable_cells(const OccupancyMap& map, CellIndex from);

struct SweepSample {
  double t{0.0};     // seconds since the traversal started
  double rate{0.0};  // detection-disc rate sum at that moment
};

// Samples the disc rate seen while traversing `path`, every dt seconds plus
// the exact endpoint. The profile is read as a left-continuous step function.
std::vector<SweepSample> sweep_rates(const PathGeometry& path, const RateGrid& grid,
                                     double disc_radius, double dt);

// Map round-trips: JSON boolean matrix and binary PGM (P5). Pixels strictly
// below free_threshold load as blocked.
void save_map_json(const OccupancyMap& map, const std::string& path);
OccupancyMap load_map_json(const std::string& path);
void save_map_pgm(const OccupancyMap& map, const std::string& path);
OccupancyMap load_map_pgm(const std::string& path, double cell_size, int free_threshold = 250);

}  // namespace persearch
