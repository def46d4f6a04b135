#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lorentz/vec2.hpp"

namespace lorentz {

/// A circular scatterer inside the unit cell. Its Z^2 translates fill the plane.
struct Disk {
  Vec2 center;
  double radius = 0.0;

  double perimeter() const;
};

/// Rational lattice direction (p, q) with gcd(|p|, |q|) = 1.
struct LatticeDirection {
  int p = 0;
  int q = 0;
  friend bool operator==(const LatticeDirection&, const LatticeDirection&) = default;
};

struct Corridor {
  LatticeDirection direction;
  double gap_width = 0.0;
};

struct FiniteHorizonReport {
  bool finite = false;
  /// Upper bound on any free flight; only set when `finite`.
  std::optional<double> max_free_path_bound;
  /// Widest corridor found; set iff `!finite`.
  std::optional<Corridor> open_corridor;
  std::size_t directions_checked = 0;
};

/// The periodic scatterer configuration. Construction validates every disk and
/// the pairwise disjointness of all translates, then runs the corridor check.
class BilliardTable {
 public:
  explicit BilliardTable(std::vector<Disk> disks);

  const std::vector<Disk>& disks() const { return disks_; }
  std::size_t size() const { return disks_.size(); }
  const Disk& disk(std::size_t i) const { return disks_[i]; }
  double min_gap() const { return min_gap_; }
  const FiniteHorizonReport& horizon() const { return horizon_; }
  double max_radius() const;
  double total_perimeter() const;

  /// Stable 64-bit digest of the exact disk parameters, as 16 hex digits.
  std::string digest() const;

 private:
  std::vector<Disk> disks_;
  double min_gap_ = 0.0;
  FiniteHorizonReport horizon_;
};

/// Checks a single disk against the cell-geometry constraints.
void validate_disk(const Disk& disk);

/// Minimum clearance |c_i - c_j - l| - (r_i + r_j) over all pairs of distinct
/// translates. Throws OverlapError at the first pair with clearance <= 0.
double validate_disjoint(const std::vector<Disk>& disks);

/// Decides finite horizon by projecting every translate family onto the normal
/// of each rational direction and looking for an uncovered stretch.
FiniteHorizonReport corridor_check(const std::vector<Disk>& disks);

/// Two disks {(0,0), r=0.4} and {(0.5,0.5), r=0.3}.
BilliardTable default_table();

}  // namespace lorentz
