#pragma once

// Generic billiard map on the periodic table. The scalar type is a template
// parameter so that the same code runs in double (production, SIMD kernel) and
// in multiprecision (exact time-reversal checks).

#include <cmath>
#include <cstdint>
#include <limits>
#include <type_traits>
#include <vector>

#include "lorentz/detail/reference_kernels.hpp"
#include "lorentz/error.hpp"
#include "lorentz/geometry.hpp"
#include "lorentz/kernels.hpp"
#include "lorentz/vec2.hpp"

namespace lorentz {

enum class HorizonMode { strict, permissive };

struct StepOptions {
  HorizonMode mode = HorizonMode::strict;
  /// Traversal cap in permissive mode.
  std::uint64_t cell_cap = 1'000'000;
  /// |<v, n>| below this at the hit point counts as a tangential hit.
  double graze_eps = 1e-12;
  /// Kernel table for the double instantiation; nullptr selects kernels::active().
  const kernels::KernelTable* kernels = nullptr;
};

template <class Real>
struct BasicCollisionState {
  int obstacle = 0;  // 0-based index into the table
  Cell cell;         // lattice translate of the obstacle
  Vec2T<Real> normal;  // outward unit normal at the collision point
  Vec2T<Real> dir;     // outgoing unit velocity
};

template <class Real>
struct BasicFlight {
  BasicCollisionState<Real> from;
  BasicCollisionState<Real> to;
  Real free_path;
  Vec2T<Real> incoming;  // velocity just before the reflection at `to`
};

template <class Real>
struct BasicRayHit {
  Real t;
  int obstacle;
  Cell cell;
};

struct StepStats {
  std::uint64_t grazing_retries = 0;
  std::uint64_t cells_visited = 0;
};

template <class Real>
class BasicBilliard {
 public:
  using State = BasicCollisionState<Real>;
  using Flight = BasicFlight<Real>;
  using Vec = Vec2T<Real>;

  static constexpr int kMaxGrazingRetries = 16;

  explicit BasicBilliard(const BilliardTable& table, StepOptions options = {})
      : table_(&table), options_(options) {
    if (options_.mode == HorizonMode::strict) {
      if (!table.horizon().finite) {
        throw ConfigError("strict mode requires a finite-horizon table");
      }
      // A segment of length L crosses at most 2 ceil(L) + 3 cells.
      const double bound = *table.horizon().max_free_path_bound;
      cell_cap_ = 2 * static_cast<std::uint64_t>(std::ceil(bound)) + 4;
    } else {
      cell_cap_ = options_.cell_cap;
    }
    if constexpr (std::is_same_v<Real, double>) {
      kernels_ = options_.kernels ? options_.kernels : &kernels::active();
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
      const Disk& d = table.disk(i);
      centers_.push_back({Real(d.center.x), Real(d.center.y)});
      radii_.push_back(Real(d.radius));
      for (int ox = -1; ox <= 1; ++ox) {
        for (int oy = -1; oy <= 1; ++oy) {
          const double cx = d.center.x + ox;
          const double cy = d.center.y + oy;
          // Distance from the translate's center to the closed unit square.
          const double ex = std::max({0.0 - cx, 0.0, cx - 1.0});
          const double ey = std::max({0.0 - cy, 0.0, cy - 1.0});
          if (std::hypot(ex, ey) > d.radius + 1e-9) continue;
          cx_.push_back(Real(d.center.x) + Real(ox));
          cy_.push_back(Real(d.center.y) + Real(oy));
          r2_.push_back(Real(d.radius) * Real(d.radius));
          cand_disk_.push_back(static_cast<int>(i));
          cand_offset_.push_back(Cell{ox, oy});
        }
      }
    }
    while (cx_.size() % kernels::kPad != 0) {
      cx_.push_back(Real(0.5));
      cy_.push_back(Real(0.5));
      r2_.push_back(Real(-1));
      cand_disk_.push_back(-1);
      cand_offset_.push_back(Cell{});
    }
  }

  const BilliardTable& table() const { return *table_; }
  const StepOptions& options() const { return options_; }
  std::uint64_t cell_cap() const { return cell_cap_; }
  std::size_t candidate_count() const { return cx_.size(); }
  const Vec& center(int obstacle) const { return centers_[obstacle]; }
  const Real& radius(int obstacle) const { return radii_[obstacle]; }

  /// Collision point relative to the corner of `state.cell`.
  Vec position(const State& s) const {
    return centers_[s.obstacle] + radii_[s.obstacle] * s.normal;
  }

  /// First obstacle met by the ray origin + t dir, t > 0, with `origin`
  /// measured from the corner of `origin_cell`. Walks the unit cells the ray
  /// crosses in order, testing the precomputed circles overlapping each cell.
  BasicRayHit<Real> cast(Cell origin_cell, const Vec& origin, const Vec& dir,
                         StepStats* stats = nullptr) const {
    using std::floor;
    const Real inf = Real(std::numeric_limits<double>::infinity());
    std::int64_t a = static_cast<std::int64_t>(floor(origin.x));
    std::int64_t b = static_cast<std::int64_t>(floor(origin.y));
    const int step_x = dir.x > 0 ? 1 : -1;
    const int step_y = dir.y > 0 ? 1 : -1;
    const Real delta_x = dir.x != 0 ? Real(1) / (dir.x > 0 ? dir.x : -dir.x) : inf;
    const Real delta_y = dir.y != 0 ? Real(1) / (dir.y > 0 ? dir.y : -dir.y) : inf;
    Real t_max_x = dir.x > 0 ? (Real(a + 1) - origin.x) * delta_x
                   : dir.x < 0 ? (origin.x - Real(a)) * delta_x
                               : inf;
    Real t_max_y = dir.y > 0 ? (Real(b + 1) - origin.y) * delta_y
                   : dir.y < 0 ? (origin.y - Real(b)) * delta_y
                               : inf;

    Real best_t = inf;
    int best_index = -1;
    Cell best_cell{};
    for (std::uint64_t visited = 1; visited <= cell_cap_; ++visited) {
      const auto hit = nearest(origin.x - Real(a), origin.y - Real(b), dir.x, dir.y);
      if (hit.index >= 0 && hit.t < best_t) {
        best_t = hit.t;
        best_index = hit.index;
        best_cell = Cell{a, b};
      }
      const Real t_exit = t_max_x < t_max_y ? t_max_x : t_max_y;
      if (best_index >= 0 && best_t <= t_exit) {
        if (stats) stats->cells_visited += visited;
        return {best_t, cand_disk_[best_index],
                origin_cell + best_cell + cand_offset_[best_index]};
      }
      if (t_max_x < t_max_y) {
        a += step_x;
        t_max_x += delta_x;
      } else {
        b += step_y;
        t_max_y += delta_y;
      }
    }
    throw HorizonExceeded(cell_cap_);
  }

  /// One application of the collision map: free flight to the next obstacle
  /// and specular reflection there.
  Flight next(const State& from, StepStats* stats = nullptr) const {
    using std::abs;
    const Vec origin = position(from);
    State start = from;
    for (int attempt = 0; attempt <= kMaxGrazingRetries; ++attempt) {
      const auto hit = cast(from.cell, origin, start.dir, stats);
      const Vec point = origin + hit.t * start.dir;
      const Cell shift = hit.cell - from.cell;
      const Vec hit_center = centers_[hit.obstacle] + Vec{Real(shift.x), Real(shift.y)};
      // Radial re-projection: the normal comes from the exact circle.
      const Vec n = normalized(point - hit_center);
      const Real vn = dot(start.dir, n);
      if (abs(vn) < Real(options_.graze_eps)) {
        if (stats) ++stats->grazing_retries;
        start.dir = rotate_slightly(start.dir);
        continue;
      }
      Vec out = start.dir - (Real(2) * vn) * n;
      // |out| = 1 up to rounding; one Newton step for 1/|out| keeps it there.
      const Real scale = (Real(3) - dot(out, out)) / Real(2);
      out = scale * out;
      return Flight{start, State{hit.obstacle, hit.cell, n, out}, hit.t, start.dir};
    }
    throw GrazingAnomaly("tangential collision persisted after direction perturbation");
  }

 private:
  detail::NearestHitT<Real> nearest(const Real& ox, const Real& oy, const Real& dx,
                                    const Real& dy) const {
    if constexpr (std::is_same_v<Real, double>) {
      const kernels::CircleBatch batch{cx_.data(), cy_.data(), r2_.data(), cx_.size()};
      const auto h = kernels_->nearest_hit(batch, ox, oy, dx, dy);
      return {h.t, h.index};
    } else {
      return detail::nearest_hit_reference<Real>(cx_.data(), cy_.data(), r2_.data(), cx_.size(),
                                                 ox, oy, dx, dy);
    }
  }

  static Vec rotate_slightly(const Vec& v) {
    // ~2^-50 rad, a few ulps of a unit vector.
    const Real eps = Real(8.881784197001252e-16);
    return normalized(Vec{v.x - eps * v.y, v.y + eps * v.x});
  }

  const BilliardTable* table_;
  StepOptions options_;
  std::uint64_t cell_cap_ = 0;
  const kernels::KernelTable* kernels_ = nullptr;
  std::vector<Vec> centers_;
  std::vector<Real> radii_;
  std::vector<Real> cx_, cy_, r2_;
  std::vector<int> cand_disk_;
  std::vector<Cell> cand_offset_;
};

}  // namespace lorentz
