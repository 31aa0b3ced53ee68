#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace swarmform {

/// Inclusive integer lattice box. Defaults span -32..32 on every axis.
struct WorldBounds {
  int min_x = -32;
  int max_x = 32;
  int min_y = -32;
  int max_y = 32;
  int min_z = -32;
  int max_z = 32;

  friend bool operator==(const WorldBounds&, const WorldBounds&) = default;

  constexpr bool valid() const {
    return min_x <= max_x && min_y <= max_y && min_z <= max_z;
  }

  constexpr bool contains(int x, int y, int z) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y &&
           z >= min_z && z <= max_z;
  }

  /// Cell counts along x / y.
  constexpr int width() const { return max_x - min_x + 1; }
  constexpr int height() const { return max_y - min_y + 1; }

  /// Number of cells in the z = 0 motion plane.
  constexpr std::int64_t plane_cells() const {
    return static_cast<std::int64_t>(width()) * height();
  }
};

/// Lattice coordinate. Ordering is lexicographic (x, y, z); construct through
/// make_location to keep every live value inside the world box.
struct Location {
  int x = 0;
  int y = 0;
  int z = 0;

  friend auto operator<=>(const Location&, const Location&) = default;
};

/// Validating constructor for Location. Throws std::invalid_argument naming
/// the first violated axis.
inline Location make_location(int x, int y, int z, const WorldBounds& bounds) {
  if (!bounds.valid()) {
    throw std::invalid_argument("world bounds invalid: min exceeds max");
  }
  auto fail = [](char axis, int value, int lo, int hi) {
    throw std::invalid_argument(std::string("location ") + axis + "=" +
                                std::to_string(value) + " outside [" +
                                std::to_string(lo) + ", " + std::to_string(hi) +
                                "] on " + axis + " axis");
  };
  if (x < bounds.min_x || x > bounds.max_x) fail('x', x, bounds.min_x, bounds.max_x);
  if (y < bounds.min_y || y > bounds.max_y) fail('y', y, bounds.min_y, bounds.max_y);
  if (z < bounds.min_z || z > bounds.max_z) fail('z', z, bounds.min_z, bounds.max_z);
  return Location{x, y, z};
}

/// Target geometry: a p x q rectangle of cells in the z = 0 plane whose
/// minimum-(x, y) corner sits at `anchor`. dimension() == p * q == cells.size().
struct ShapeSpec {
  int p = 0;
  int q = 0;
  Location anchor;
  std::vector<Location> cells;  // sorted ascending

  friend bool operator==(const ShapeSpec&, const ShapeSpec&) = default;

  int dimension() const { return p * q; }

  bool is_target(const Location& loc) const {
    return std::binary_search(cells.begin(), cells.end(), loc);
  }
};

inline ShapeSpec make_shape_spec(int p, int q, const Location& anchor,
                                 const WorldBounds& bounds) {
  if (p < 1 || q < 1) {
    throw std::invalid_argument("shape extents must be positive, got p=" +
                                std::to_string(p) + " q=" + std::to_string(q));
  }
  if (anchor.z != 0) {
    throw std::invalid_argument("shape anchor must lie in the z=0 plane");
  }
  if (!bounds.contains(anchor.x, anchor.y, 0) ||
      !bounds.contains(anchor.x + p - 1, anchor.y + q - 1, 0)) {
    throw std::invalid_argument(
        "shape rectangle " + std::to_string(p) + "x" + std::to_string(q) +
        " at (" + std::to_string(anchor.x) + ", " + std::to_string(anchor.y) +
        ") exceeds world bounds");
  }
  ShapeSpec spec;
  spec.p = p;
  spec.q = q;
  spec.anchor = Location{anchor.x, anchor.y, 0};
  spec.cells.reserve(static_cast<std::size_t>(p) * q);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < q; ++j) {
      spec.cells.push_back(Location{anchor.x + i, anchor.y + j, 0});
    }
  }
  std::sort(spec.cells.begin(), spec.cells.end());
  return spec;
}

/// In-bounds 4-neighborhood at constant z, in fixed (+x, -x, +y, -y) order.
inline std::vector<Location> neighbors(const Location& loc,
                                       const WorldBounds& bounds) {
  std::vector<Location> out;
  out.reserve(4);
  const int dx[] = {1, -1, 0, 0};
  const int dy[] = {0, 0, 1, -1};
  for (int k = 0; k < 4; ++k) {
    const int nx = loc.x + dx[k];
    const int ny = loc.y + dy[k];
    if (bounds.contains(nx, ny, loc.z)) {
      out.push_back(Location{nx, ny, loc.z});
    }
  }
  return out;
}

/// The k target cells nearest the origin, squared Euclidean distance with
/// (x, then y) tie-break. Prefix-stable: seed_cells(spec, k) is a prefix of
/// seed_cells(spec, k + 1).
inline std::vector<Location> seed_cells(const ShapeSpec& spec, int k) {
  if (k < 1 || k > spec.dimension()) {
    throw std::invalid_argument("seed count " + std::to_string(k) +
                                " outside [1, " +
                                std::to_string(spec.dimension()) + "]");
  }
  std::vector<Location> ordered = spec.cells;
  auto dist2 = [](const Location& c) {
    return static_cast<std::int64_t>(c.x) * c.x +
           static_cast<std::int64_t>(c.y) * c.y +
           static_cast<std::int64_t>(c.z) * c.z;
  };
  std::sort(ordered.begin(), ordered.end(),
            [&](const Location& a, const Location& b) {
              if (dist2(a) != dist2(b)) return dist2(a) < dist2(b);
              if (a.x != b.x) return a.x < b.x;
              return a.y < b.y;
            });
  ordered.resize(static_cast<std::size_t>(k));
  return ordered;
}

}  // namespace swarmform
