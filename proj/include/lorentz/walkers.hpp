#pragma once

// Sources of site sequences consumed by the estimators. A source hands out
// independent walkers keyed by seed; every walker reports its starting site
// (k = 0) and then one site per step.

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lorentz/dynamics.hpp"
#include "lorentz/selfintersect.hpp"

namespace lorentz {

struct WalkStep {
  std::uint64_t key;
  Cell cell;
};

template <class S>
concept SiteSource = requires(const S& s, std::uint64_t seed) {
  { s.walker(seed).initial() } -> std::same_as<WalkStep>;
  { s.walker(seed).next() } -> std::same_as<WalkStep>;
  { s.digest() } -> std::convertible_to<std::string>;
};

class BilliardSource {
 public:
  BilliardSource(const BilliardTable& table, StepOptions options = {},
                 InitMode init = InitMode::stationary)
      : billiard_(table, options), codec_(table.size()), init_(init) {}

  class Walker {
   public:
    Walker(const BilliardSource& src, std::uint64_t seed)
        : codec_(&src.codec_), traj_(src.billiard_, seed, src.init_) {}
    WalkStep initial() const {
      const auto& s = traj_.initial();
      return {codec_->encode({s.obstacle, s.cell}), s.cell};
    }
    WalkStep next() {
      const auto s = traj_.next();
      return {codec_->encode({s.obstacle, s.cell}), s.cell};
    }
    const Trajectory& trajectory() const { return traj_; }

   private:
    const SiteCodec* codec_;
    Trajectory traj_;
  };

  Walker walker(std::uint64_t seed) const { return Walker(*this, seed); }
  std::string digest() const { return billiard_.table().digest(); }
  const Billiard& billiard() const { return billiard_; }
  InitMode init() const { return init_; }

 private:
  Billiard billiard_;
  SiteCodec codec_;
  InitMode init_;
};

/// Lazy nearest-neighbour walk on Z^2: each of +-e1, +-e2 and "stay" with
/// probability 1/5. One obstacle per cell, so the site is the cell.
/// Step covariance is (2/5) Id.
class LazyWalkSource {
 public:
  class Walker {
   public:
    explicit Walker(std::uint64_t seed) : rng_(seed), codec_(1) {}
    WalkStep initial() const { return {codec_.encode({0, Cell{}}), Cell{}}; }
    WalkStep next() {
      switch (pick()) {
        case 0: ++pos_.x; break;
        case 1: --pos_.x; break;
        case 2: ++pos_.y; break;
        case 3: --pos_.y; break;
        default: break;
      }
      return {codec_.encode({0, pos_}), pos_};
    }

   private:
    // One 64-bit draw below 5^27 * floor(2^64 / 5^27) yields 27 uniform
    // base-5 digits.
    static constexpr std::uint64_t kDigits = 27;
    static constexpr std::uint64_t kPow = 7450580596923828125ULL;  // 5^27
    static constexpr std::uint64_t kLimit = kPow * (~std::uint64_t{0} / kPow);

    int pick() {
      if (left_ == 0) {
        std::uint64_t r;
        do r = rng_(); while (r >= kLimit);
        buf_ = r % kPow;
        left_ = kDigits;
      }
      const int d = static_cast<int>(buf_ % 5);
      buf_ /= 5;
      --left_;
      return d;
    }

    Rng rng_;
    std::uint64_t buf_ = 0;
    std::uint64_t left_ = 0;
    SiteCodec codec_;
    Cell pos_{};
  };

  Walker walker(std::uint64_t seed) const { return Walker(seed); }
  std::string digest() const { return "lazy-walk"; }
};

/// One walker, V_n reported at each checkpoint (sorted, within [1, n_max]).
template <SiteSource Source>
std::vector<std::pair<std::uint64_t, std::uint64_t>> v_series(
    const Source& source, std::uint64_t n_max, std::span<const std::uint64_t> checkpoints,
    std::uint64_t seed) {
  auto w = source.walker(derive_seed(seed, Stream::trajectory, 0));
  VisitCounter counter;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  std::size_t c = 0;
  for (std::uint64_t k = 1; k <= n_max && c < checkpoints.size(); ++k) {
    const auto v = counter.visit(w.next().key);
    while (c < checkpoints.size() && checkpoints[c] == k) out.emplace_back(k, v), ++c;
  }
  return out;
}

}  // namespace lorentz
