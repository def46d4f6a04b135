#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "lorentz/vec2.hpp"

namespace lorentz {

/// A visited scatterer copy: obstacle index and lattice cell.
struct Site {
  int obstacle = 0;
  Cell cell;
  friend bool operator==(const Site&, const Site&) = default;
};

/// Packs a Site into one 64-bit word: ceil(log2 I) bits of obstacle index,
/// the rest split evenly between the two cell coordinates. With I <= 4 each
/// coordinate gets 31 bits, i.e. |S| < 2^30. Out-of-range cells throw.
class SiteCodec {
 public:
  explicit SiteCodec(std::size_t obstacle_count);

  std::uint64_t encode(const Site& site) const {
    if (site.obstacle < 0 || static_cast<std::size_t>(site.obstacle) >= obstacle_count_ ||
        site.cell.x < -limit_ || site.cell.x >= limit_ || site.cell.y < -limit_ ||
        site.cell.y >= limit_) {
      throw_out_of_range(site);
    }
    const std::uint64_t mask = (std::uint64_t{1} << coord_bits_) - 1;
    const auto x = static_cast<std::uint64_t>(site.cell.x + limit_) & mask;
    const auto y = static_cast<std::uint64_t>(site.cell.y + limit_) & mask;
    return (((static_cast<std::uint64_t>(site.obstacle) << coord_bits_) | x) << coord_bits_) | y;
  }
  Site decode(std::uint64_t key) const;
  std::int64_t coordinate_limit() const { return limit_; }

 private:
  [[noreturn]] void throw_out_of_range(const Site& site) const;

  std::size_t obstacle_count_;
  unsigned obstacle_bits_;
  unsigned coord_bits_;
  std::int64_t limit_;
};

/// Streaming self-intersection count V_n = sum over sites of (visits)^2.
class VisitCounter {
 public:
  /// Records one more collision at `key`; returns the updated V.
  std::uint64_t visit(std::uint64_t key) {
    auto& m = counts_[key];
    v_ += 2 * static_cast<std::uint64_t>(m) + 1;
    ++m;
    ++n_;
    return v_;
  }

  std::uint64_t value() const { return v_; }
  std::uint64_t collisions() const { return n_; }
  std::size_t distinct_sites() const { return counts_.size(); }
  std::uint32_t count(std::uint64_t key) const;
  void reserve(std::size_t n) { counts_.reserve(n); }
  void clear();

 private:
  absl::flat_hash_map<std::uint64_t, std::uint32_t> counts_;
  std::uint64_t v_ = 0;
  std::uint64_t n_ = 0;
};

/// The defining double sum, evaluated literally in O(n^2). Test-scale only.
std::uint64_t brute_force_v(std::span<const std::uint64_t> sites);

}  // namespace lorentz
