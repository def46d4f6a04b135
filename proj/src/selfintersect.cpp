#include "lorentz/selfintersect.hpp"

#include <bit>
#include <string>

#include "lorentz/error.hpp"

namespace lorentz {

SiteCodec::SiteCodec(std::size_t obstacle_count) : obstacle_count_(obstacle_count) {
  if (obstacle_count == 0) throw ConfigError("site codec needs at least one obstacle");
  obstacle_bits_ = obstacle_count == 1 ? 0 : std::bit_width(obstacle_count - 1);
  coord_bits_ = (64 - obstacle_bits_) / 2;
  limit_ = std::int64_t{1} << (coord_bits_ - 1);
}

void SiteCodec::throw_out_of_range(const Site& s) const {
  if (s.obstacle < 0 || static_cast<std::size_t>(s.obstacle) >= obstacle_count_) {
    throw Error("obstacle index " + std::to_string(s.obstacle) + " out of range");
  }
  throw Error("cell (" + std::to_string(s.cell.x) + "," + std::to_string(s.cell.y) +
              ") exceeds the site key range");
}

Site SiteCodec::decode(std::uint64_t key) const {
  const std::uint64_t mask = (std::uint64_t{1} << coord_bits_) - 1;
  const auto y = static_cast<std::int64_t>(key & mask) - limit_;
  key >>= coord_bits_;
  const auto x = static_cast<std::int64_t>(key & mask) - limit_;
  key >>= coord_bits_;
  return Site{static_cast<int>(key), Cell{x, y}};
}

std::uint32_t VisitCounter::count(std::uint64_t key) const {
  const auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

void VisitCounter::clear() {
  counts_.clear();
  v_ = 0;
  n_ = 0;
}

std::uint64_t brute_force_v(std::span<const std::uint64_t> sites) {
  std::uint64_t v = 0;
  for (std::size_t k = 0; k < sites.size(); ++k) {
    for (std::size_t l = 0; l < sites.size(); ++l) {
      if (sites[k] == sites[l]) ++v;
    }
  }
  return v;
}

}  // namespace lorentz
