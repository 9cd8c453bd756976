#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "mtw/curve.hpp"

namespace testing {

constexpr double kPi = std::numbers::pi;

// Hand-rolled generators; a fixed seed per test keeps runs reproducible.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(unsigned long long seed) : rng(seed) {}

  double uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<unsigned>(hi - lo + 1)); }
  mtw::cplx complex(double radius) { return {uniform(-radius, radius), uniform(-radius, radius)}; }

  // Generic complex point away from the real axis, random sheet.
  mtw::CurvePoint curve_point(const mtw::BranchConfig& cfg) {
    const double lo = cfg.points.front() - 1.0, hi = cfg.points.back() + 1.0;
    mtw::cplx z(uniform(lo, hi), uniform(0.05, 2.0) * (uniform() < 0.5 ? -1.0 : 1.0));
    return mtw::curve_point(cfg, z, uniform() < 0.5 ? mtw::Sheet::Plus : mtw::Sheet::Minus);
  }
};

}  // namespace testing
