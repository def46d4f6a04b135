#include "lorentz/dynamics.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "lorentz/csv.hpp"

namespace lorentz {

template class BasicBilliard<double>;

InitMode parse_init_mode(std::string_view text) {
  if (text == "stationary") return InitMode::stationary;
  if (text == "uniform-q") return InitMode::uniform_q;
  throw ConfigError("unknown init mode '" + std::string(text) + "'");
}

std::string_view to_string(InitMode mode) {
  return mode == InitMode::stationary ? "stationary" : "uniform-q";
}

double boundary_angle(const CollisionState& s) {
  double theta = std::atan2(s.normal.y, s.normal.x);
  if (theta < 0) theta += 2.0 * std::numbers::pi;
  return theta;
}

double incidence(const CollisionState& s) {
  return std::atan2(cross(s.normal, s.dir), dot(s.normal, s.dir));
}

CollisionState sample_stationary(const Billiard& billiard, Rng& rng) {
  const auto& disks = billiard.table().disks();
  std::vector<double> perimeters;
  perimeters.reserve(disks.size());
  for (const auto& d : disks) perimeters.push_back(d.perimeter());
  std::discrete_distribution<int> pick(perimeters.begin(), perimeters.end());

  CollisionState s;
  s.obstacle = pick(rng);
  const double theta = 2.0 * std::numbers::pi * uniform01(rng);
  const double sin_phi = 2.0 * uniform01(rng) - 1.0;
  const double cos_phi = std::sqrt(1.0 - sin_phi * sin_phi);
  s.normal = {std::cos(theta), std::sin(theta)};
  const Vec2 tangent{-s.normal.y, s.normal.x};
  s.dir = normalized(cos_phi * s.normal + sin_phi * tangent);
  return s;
}

CollisionState sample_uniform_q(const Billiard& billiard, Rng& rng) {
  const auto& table = billiard.table();
  Vec2 x;
  for (;;) {
    x = {uniform01(rng), uniform01(rng)};
    bool free = true;
    for (const auto& d : table.disks()) {
      for (int ox = -1; ox <= 1 && free; ++ox) {
        for (int oy = -1; oy <= 1 && free; ++oy) {
          const Vec2 c = d.center + Vec2{double(ox), double(oy)};
          if (dot(x - c, x - c) <= d.radius * d.radius) free = false;
        }
      }
    }
    if (free) break;
  }
  const double alpha = 2.0 * std::numbers::pi * uniform01(rng);
  const Vec2 u{std::cos(alpha), std::sin(alpha)};
  const auto hit = billiard.cast(Cell{0, 0}, x, -u);
  const Vec2 point = x - hit.t * u;
  const Vec2 center = billiard.center(hit.obstacle) + Vec2{double(hit.cell.x), double(hit.cell.y)};
  return CollisionState{hit.obstacle, hit.cell, normalized(point - center), u};
}

Trajectory::Trajectory(const Billiard& billiard, std::uint64_t seed, InitMode init)
    : billiard_(&billiard) {
  Rng rng(seed);
  initial_ = init == InitMode::stationary ? sample_stationary(billiard, rng)
                                          : sample_uniform_q(billiard, rng);
  state_ = initial_;
}

Trajectory::Trajectory(const Billiard& billiard, const CollisionState& initial)
    : billiard_(&billiard), initial_(initial), state_(initial) {}

TrajectoryStep Trajectory::next() {
  last_ = billiard_->next(state_, &stats_);
  state_ = last_.to;
  ++k_;
  return {k_, state_.obstacle, state_.cell, last_.free_path};
}

void write_trajectory_csv(std::ostream& out, const Billiard& billiard, std::uint64_t n,
                          std::uint64_t seed, InitMode init) {
  Trajectory traj(billiard, derive_seed(seed, Stream::trajectory, 0), init);
  out << "k,I_k,S_x,S_y,free_path\n";
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto s = traj.next();
    out << s.k << ',' << (s.obstacle + 1) << ',' << s.cell.x << ',' << s.cell.y << ','
        << format_double(s.free_path) << '\n';
  }
}

}  // namespace lorentz
