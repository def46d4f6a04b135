#include "lorentz/geometry.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>

#include "lorentz/error.hpp"

namespace lorentz {

namespace {

// Interval endpoints closer than this are treated as touching, and touching
// intervals leave a (zero-width) corridor.
constexpr double kEndpointTolerance = 1e-12;

struct Segment {
  double begin;
  double end;
};

// Widest uncovered stretch of the circle [0, period) by the given arcs, or a
// negative value when the arcs cover it. The circle is unrolled onto three
// periods starting at the leftmost arc so that wrapped arcs need no clipping.
double widest_gap(const std::vector<Segment>& arcs, double period) {
  double origin = std::numeric_limits<double>::infinity();
  for (const auto& a : arcs) {
    if (a.end - a.begin >= period + kEndpointTolerance) return -1.0;
    double b = std::fmod(a.begin, period);
    if (b < 0) b += period;
    origin = std::min(origin, b);
  }
  std::vector<Segment> line;
  line.reserve(3 * arcs.size());
  for (const auto& a : arcs) {
    double b = std::fmod(a.begin - origin, period);
    if (b < 0) b += period;
    const double len = a.end - a.begin;
    for (int shift = -1; shift <= 1; ++shift) {
      line.push_back({b + shift * period, b + len + shift * period});
    }
  }
  std::sort(line.begin(), line.end(),
            [](const Segment& a, const Segment& b) { return a.begin < b.begin; });

  double widest = -1.0;
  double reach = line.front().end;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const auto& s = line[i];
    const bool in_window = reach >= -kEndpointTolerance && reach < period - kEndpointTolerance;
    if (in_window && s.begin > reach - kEndpointTolerance) {
      widest = std::max(widest, std::max(0.0, s.begin - reach));
    }
    reach = std::max(reach, s.end);
  }
  return widest;
}

std::vector<LatticeDirection> enumerate_directions(double norm2_limit) {
  std::vector<LatticeDirection> dirs;
  const int bound = static_cast<int>(std::ceil(std::sqrt(norm2_limit)));
  for (int p = 0; p <= bound; ++p) {
    for (int q = -bound; q <= bound; ++q) {
      if (p == 0 && q != 1) continue;
      if (std::gcd(p, q) != 1) continue;
      if (static_cast<double>(p * p + q * q) >= norm2_limit) continue;
      dirs.push_back({p, q});
    }
  }
  std::stable_sort(dirs.begin(), dirs.end(), [](const auto& a, const auto& b) {
    const int na = a.p * a.p + a.q * a.q;
    const int nb = b.p * b.p + b.q * b.q;
    if (na != nb) return na < nb;
    if (a.p != b.p) return a.p > b.p;
    return a.q > b.q;
  });
  return dirs;
}

}  // namespace

OverlapError::OverlapError(int first_, int second_, std::array<int, 2> translate_, double gap_)
    : Error("OverlapError: disks " + std::to_string(first_ + 1) + " and " +
            std::to_string(second_ + 1) + " overlap at translate (" +
            std::to_string(translate_[0]) + "," + std::to_string(translate_[1]) +
            "), clearance " + std::to_string(gap_)),
      first(first_),
      second(second_),
      translate(translate_),
      gap(gap_) {}

HorizonExceeded::HorizonExceeded(std::uint64_t cells_)
    : Error("HorizonExceeded: no obstacle met within " + std::to_string(cells_) + " cells"),
      cells(cells_) {}

double Disk::perimeter() const { return 2.0 * std::numbers::pi * radius; }

void validate_disk(const Disk& d) {
  if (!std::isfinite(d.center.x) || !std::isfinite(d.center.y) || !std::isfinite(d.radius)) {
    throw ConfigError("disk parameters must be finite");
  }
  if (!(d.radius > 0.0 && d.radius < 0.5)) {
    throw ConfigError("disk radius must lie in (0, 0.5), got " + std::to_string(d.radius));
  }
  if (d.center.x < 0.0 || d.center.x >= 1.0 || d.center.y < 0.0 || d.center.y >= 1.0) {
    throw ConfigError("disk center must lie in [0,1)^2");
  }
}

double validate_disjoint(const std::vector<Disk>& disks) {
  if (disks.empty()) throw ConfigError("table needs at least one disk");
  for (const auto& d : disks) validate_disk(d);

  double min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < disks.size(); ++i) {
    for (std::size_t j = i; j < disks.size(); ++j) {
      for (int lx = -1; lx <= 1; ++lx) {
        for (int ly = -1; ly <= 1; ++ly) {
          if (i == j && lx == 0 && ly == 0) continue;
          const Vec2 delta = disks[i].center - disks[j].center - Vec2{double(lx), double(ly)};
          const double gap = norm(delta) - (disks[i].radius + disks[j].radius);
          if (gap <= 0.0) {
            throw OverlapError(static_cast<int>(i), static_cast<int>(j), {lx, ly}, gap);
          }
          min_gap = std::min(min_gap, gap);
        }
      }
    }
  }
  return min_gap;
}

FiniteHorizonReport corridor_check(const std::vector<Disk>& disks) {
  validate_disjoint(disks);
  double r_max = 0.0;
  for (const auto& d : disks) r_max = std::max(r_max, d.radius);

  // A single family of half-width r covers any period <= 2r, so directions
  // with 1/|(p,q)| <= 2 r_max need no check.
  const double limit = 1.0 / (2.0 * r_max);
  const auto dirs = enumerate_directions(limit * limit);

  FiniteHorizonReport report;
  report.directions_checked = dirs.size();
  double longest = 1.0;
  std::vector<Segment> arcs(disks.size());
  for (const auto& dir : dirs) {
    const double len = std::hypot(double(dir.p), double(dir.q));
    const Vec2 normal{-dir.q / len, dir.p / len};
    for (std::size_t i = 0; i < disks.size(); ++i) {
      const double proj = dot(disks[i].center, normal);
      arcs[i] = {proj - disks[i].radius, proj + disks[i].radius};
    }
    longest = std::max(longest, len);
    const double gap = widest_gap(arcs, 1.0 / len);
    if (gap >= 0.0 && (!report.open_corridor || gap > report.open_corridor->gap_width)) {
      report.open_corridor = Corridor{dir, gap};
    }
  }
  report.finite = !report.open_corridor.has_value();
  if (report.finite) report.max_free_path_bound = longest * (1.0 + 2.0 * r_max);
  return report;
}

BilliardTable::BilliardTable(std::vector<Disk> disks) : disks_(std::move(disks)) {
  min_gap_ = validate_disjoint(disks_);
  horizon_ = corridor_check(disks_);
}

double BilliardTable::max_radius() const {
  double r = 0.0;
  for (const auto& d : disks_) r = std::max(r, d.radius);
  return r;
}

double BilliardTable::total_perimeter() const {
  double p = 0.0;
  for (const auto& d : disks_) p += d.perimeter();
  return p;
}

std::string BilliardTable::digest() const {
  // FNV-1a over the IEEE bit patterns of every parameter.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](double v) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& d : disks_) {
    mix(d.center.x);
    mix(d.center.y);
    mix(d.radius);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

BilliardTable default_table() {
  return BilliardTable({Disk{{0.0, 0.0}, 0.4}, Disk{{0.5, 0.5}, 0.3}});
}

}  // namespace lorentz
