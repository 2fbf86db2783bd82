#pragma once

#include <cmath>

namespace persearch {

struct Vec2 {
  double x{0.0};
  double y{0.0};
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

struct CellIndex {
  int x{0};
  int y{0};
};

inline bool operator==(CellIndex a, CellIndex b) { return a.x == b.x && a.y == b.y; }
inline bool operator!=(CellIndex a, CellIndex b) { return !(a == b); }
inline bool operator<(CellIndex a, CellIndex b) {
  return a.y != b.y ? a.y < b.y : a.x < b.x;  // row-major order
}

}  // namespace persearch
