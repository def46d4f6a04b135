#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "lorentz/geometry.hpp"

namespace testing {

inline lorentz::BilliardTable single_disk(double x, double y, double r) {
  return lorentz::BilliardTable({lorentz::Disk{{x, y}, r}});
}

/// Random valid table with 1..max_disks disks, by rejection.
inline std::vector<lorentz::Disk> random_disks(std::mt19937_64& rng, int max_disks,
                                               double r_lo = 0.05, double r_hi = 0.45) {
  std::uniform_real_distribution<double> u(0.0, 1.0), r(r_lo, r_hi);
  std::uniform_int_distribution<int> count(1, max_disks);
  for (;;) {
    std::vector<lorentz::Disk> disks;
    const int n = count(rng);
    for (int i = 0; i < n; ++i) disks.push_back({{u(rng), u(rng)}, r(rng)});
    try {
      lorentz::validate_disjoint(disks);
      return disks;
    } catch (const std::exception&) {
    }
  }
}

/// Chi-square upper quantile by Wilson-Hilferty; good to ~1% for dof >= 30.
inline double chi2_quantile(double dof, double z) {
  const double a = 2.0 / (9.0 * dof);
  const double c = 1.0 - a + z * std::sqrt(a);
  return dof * c * c * c;
}

}  // namespace testing
