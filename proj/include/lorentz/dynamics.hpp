#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

#include "lorentz/detail/billiard.hpp"
#include "lorentz/rng.hpp"

namespace lorentz {

using CollisionState = BasicCollisionState<double>;
using FlightRecord = BasicFlight<double>;
using Billiard = BasicBilliard<double>;

extern template class BasicBilliard<double>;

enum class InitMode { stationary, uniform_q };

InitMode parse_init_mode(std::string_view text);
std::string_view to_string(InitMode mode);

/// Position on the obstacle boundary, in [0, 2pi).
double boundary_angle(const CollisionState& s);

/// Signed angle from the outward normal to the outgoing velocity, in (-pi/2, pi/2).
double incidence(const CollisionState& s);

/// Draws from the invariant collision measure: obstacle with probability
/// proportional to its perimeter, uniform boundary angle, sin(incidence)
/// uniform on (-1, 1). The cell is (0, 0).
CollisionState sample_stationary(const Billiard& billiard, Rng& rng);

/// Uniform position in the free region of the unit cell and uniform
/// direction, then flown backwards to the previous collision.
CollisionState sample_uniform_q(const Billiard& billiard, Rng& rng);

struct TrajectoryStep {
  std::uint64_t k;
  int obstacle;
  Cell cell;
  double free_path;
};

/// The collision sequence (I_k, S_k), k = 1, 2, ... of one particle. The
/// k = 0 state is kept in `initial()` but never emitted.
class Trajectory {
 public:
  Trajectory(const Billiard& billiard, std::uint64_t seed, InitMode init = InitMode::stationary);

  /// Starts from an explicit state instead of a random one.
  Trajectory(const Billiard& billiard, const CollisionState& initial);

  TrajectoryStep next();

  const CollisionState& initial() const { return initial_; }
  const CollisionState& state() const { return state_; }
  /// The last flight taken by `next()`.
  const FlightRecord& last_flight() const { return last_; }
  std::uint64_t steps() const { return k_; }
  const StepStats& stats() const { return stats_; }

 private:
  const Billiard* billiard_;
  CollisionState initial_;
  CollisionState state_;
  FlightRecord last_{};
  std::uint64_t k_ = 0;
  StepStats stats_;
};

/// CSV dump `k,I_k,S_x,S_y,free_path` with 1-based obstacle indices.
void write_trajectory_csv(std::ostream& out, const Billiard& billiard, std::uint64_t n,
                          std::uint64_t seed, InitMode init);

}  // namespace lorentz
