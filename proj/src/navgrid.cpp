#include "persearch/navgrid.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <tuple>

#include "json.hpp"

namespace persearch {

void OccupancyMap::validate() const {
  if (width <= 0 || height <= 0) throw std::invalid_argument("map dimensions must be positive");
  if (!(cell_size > 0.0)) throw std::invalid_argument("cell_size must be positive");
  if (blocked.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("blocked array size does not match dimensions");
}

OccupancyMap make_open_map(int width, int height, double cell_size) {
  OccupancyMap m{width, height, cell_size, {}};
  m.blocked.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 0);
  m.validate();
  return m;
}

double polyline_length(const std::vector<Vec2>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

Vec2 point_along(const PathGeometry& path, double arc) {
  if (path.waypoints.empty()) throw std::invalid_argument("empty path");
  if (arc <= 0.0) return path.waypoints.front();
  double rest = arc;
  for (std::size_t i = 1; i < path.waypoints.size(); ++i) {
    const Vec2 a = path.waypoints[i - 1];
    const Vec2 b = path.waypoints[i];
    const double seg = distance(a, b);
    if (rest <= seg && seg > 0.0) {
      const double f = rest / seg;
      return {a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)};
    }
    rest -= seg;
  }
  return path.waypoints.back();
}

namespace {

constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};

bool step_allowed(const OccupancyMap& map, CellIndex from, int dir) {
  const CellIndex to{from.x + kDx[dir], from.y + kDy[dir]};
  if (!map.is_free(to)) return false;
  if (dir >= 4) {  // diagonal: both orthogonal neighbours must be free
    if (!map.is_free({from.x + kDx[dir], from.y})) return false;
    if (!map.is_free({from.x, from.y + kDy[dir]})) return false;
  }
  return true;
}

}  // namespace

PathGeometry plan_path(const OccupancyMap& map, Vec2 from, Vec2 to, double avg_speed) {
  map.validate();
  if (!(avg_speed > 0.0)) throw std::invalid_argument("avg_speed must be positive");
  const CellIndex start = map.cell_at(from);
  const CellIndex goal = map.cell_at(to);
  if (!map.is_free(start) || !map.is_free(goal))
    throw std::invalid_argument("start and goal must be free cells");
  if (start == goal) throw std::invalid_argument("start and goal occupy the same cell");

  const double kSqrt2 = std::sqrt(2.0);
  const auto heuristic = [&](CellIndex c) {
    const int dx = std::abs(c.x - goal.x);
    const int dy = std::abs(c.y - goal.y);
    return (std::max(dx, dy) - std::min(dx, dy)) + kSqrt2 * std::min(dx, dy);
  };

  const std::size_t n = static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height);
  std::vector<double> g(n, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n, -1);
  std::vector<std::uint8_t> closed(n, 0);

  using Node = std::tuple<double, double, int>;  // f, g, index: ordered for determinism
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  const int start_i = map.row_major(start);
  g[static_cast<std::size_t>(start_i)] = 0.0;
  open.emplace(heuristic(start), 0.0, start_i);

  const int goal_i = map.row_major(goal);
  while (!open.empty()) {
    const auto [f, gc, idx] = open.top();
    open.pop();
    if (closed[static_cast<std::size_t>(idx)]) continue;
    closed[static_cast<std::size_t>(idx)] = 1;
    if (idx == goal_i) break;
    const CellIndex c{idx % map.width, idx / map.width};
    for (int d = 0; d < 8; ++d) {
      if (!step_allowed(map, c, d)) continue;
      const CellIndex nb{c.x + kDx[d], c.y + kDy[d]};
      const int nb_i = map.row_major(nb);
      const double cost = (d >= 4 ? kSqrt2 : 1.0);
      const double cand = gc + cost;
      if (cand < g[static_cast<std::size_t>(nb_i)] - 1e-12) {
        g[static_cast<std::size_t>(nb_i)] = cand;
        parent[static_cast<std::size_t>(nb_i)] = idx;
        open.emplace(cand + heuristic(nb), cand, nb_i);
      }
    }
  }

  if (!closed[static_cast<std::size_t>(goal_i)]) throw NoPathError("goal unreachable");

  std::vector<Vec2> waypoints;
  for (int i = goal_i; i != -1; i = parent[static_cast<std::size_t>(i)])
    waypoints.push_back(map.cell_center({i % map.width, i / map.width}));
  std::reverse(waypoints.begin(), waypoints.end());

  PathGeometry path;
  path.waypoints = std::move(waypoints);
  path.length = polyline_length(path.waypoints);
  path.avg_speed = avg_speed;
  return path;
}

PathGeometry truncate_at_goal(const PathGeometry& path, Vec2 goal, double offset) {
  if (path.waypoints.size() < 2) return path;
  std::size_t cut = path.waypoints.size() - 1;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    if (distance(path.waypoints[i], goal) <= offset) {
      cut = std::max<std::size_t>(i, 1);  // keep at least one segment
      break;
    }
  }
  PathGeometry out;
  out.waypoints.assign(path.waypoints.begin(),
                       path.waypoints.begin() + static_cast<std::ptrdiff_t>(cut) + 1);
  out.length = polyline_length(out.waypoints);
  out.avg_speed = path.avg_speed;
  return out;
}

std::vector<std::uint8_t> reachable_cells(const OccupancyMap& map, CellIndex from) {
  map.validate();
  std::vector<std::uint8_t> seen(
      static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height), 0);
  if (!map.is_free(from)) return seen;
  std::vector<CellIndex> stack{from};
  seen[static_cast<std::size_t>(map.row_major(from))] = 1;
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    for (int d = 0; d < 8; ++d) {
      if (!step_allowed(map, c, d)) continue;
      const CellIndex nb{c.x + kDx[d], c.y + kDy[d]};
      auto& flag = seen[static_cast<std::size_t>(map.row_major(nb))];
      if (!flag) {
        flag = 1;
        stack.push_back(nb);
      }
    }
  }
  return seen;
}

std::vector<SweepSample> sweep_rates(const PathGeometry& path, const RateGrid& grid,
                                     double disc_radius, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (path.waypoints.empty()) throw std::invalid_argument("empty path");
  const double dur = path.duration();
  std::vector<SweepSample> out;
  const auto steps = static_cast<long long>(std::floor(dur / dt + 1e-9));
  for (long long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Vec2 pos = point_along(path, path.avg_speed * t);
    out.push_back({t, rate_in_disc(grid, {pos, disc_radius}).rate});
  }
  if (out.back().t < dur - 1e-9 * std::max(dur, 1.0)) {
    const Vec2 pos = point_along(path, path.length);
    out.push_back({dur, rate_in_disc(grid, {pos, disc_radius}).rate});
  }
  return out;
}

void save_map_json(const OccupancyMap& map, const std::string& path) {
  map.validate();
  nlohmann::ordered_json j;
  j["width"] = map.width;
  j["height"] = map.height;
  j["cell_size"] = map.cell_size;
  auto rows = nlohmann::ordered_json::array();
  for (int y = 0; y < map.height; ++y) {
    auto row = nlohmann::ordered_json::array();
    for (int x = 0; x < map.width; ++x) row.push_back(!map.is_free({x, y}));
    rows.push_back(std::move(row));
  }
  j["blocked"] = std::move(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

OccupancyMap load_map_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  in >> j;
  OccupancyMap map;
  map.width = j.at("width").get<int>();
  map.height = j.at("height").get<int>();
  map.cell_size = j.at("cell_size").get<double>();
  const auto& rows = j.at("blocked");
  if (static_cast<int>(rows.size()) != map.height)
    throw std::runtime_error("blocked matrix height mismatch");
  map.blocked.reserve(static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height));
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != map.width)
      throw std::runtime_error("blocked matrix width mismatch");
    for (const auto& v : row) map.blocked.push_back(v.get<bool>() ? 1 : 0);
  }
  map.validate();
  return map;
}

void save_map_pgm(const OccupancyMap& map, const std::string& path) {
  map.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "P5\n" << map.width << " " << map.height << "\n255\n";
  for (std::uint8_t b : map.blocked) out.put(b ? '\0' : static_cast<char>(254));
}

OccupancyMap load_map_pgm(const std::string& path, double cell_size, int free_threshold) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5") throw std::runtime_error("unsupported PGM magic: " + magic);
  const auto next_int = [&in, &path]() {
    // skip whitespace and '#' comment lines between header fields
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
      if (c == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
      else in.get();
      c = in.peek();
    }
    int v;
    if (!(in >> v)) throw std::runtime_error("truncated PGM header in " + path);
    return v;
  };
  OccupancyMap map;
  map.width = next_int();
  map.height = next_int();
  const int maxval = next_int();
  if (maxval <= 0 || maxval > 255) throw std::runtime_error("unsupported PGM maxval");
  in.get();  // single whitespace after maxval
  map.cell_size = cell_size;
  const std::size_t n = static_cast<std::size_t>(map.width) * static_cast<std::size_t>(map.height);
  std::vector<char> pixels(n);
  if (!in.read(pixels.data(), static_cast<std::streamsize>(n)))
    throw std::runtime_error("truncated PGM payload in " + path);
  map.blocked.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    map.blocked[i] = static_cast<std::uint8_t>(pixels[i]) < free_threshold ? 1 : 0;
  map.validate();
  return map;
}

}  // namespace persearch
