#pragma once

#include <random>
#include <vector>

#include "mtw/surface.hpp"

namespace mtw {

// Fiber surface x y = prod_{i=1}^{2l} (z - a_i) of the A_{2l-1} twistor space.
struct AleConfig {
  int l = 0;
  std::vector<double> a;

  static AleConfig make(std::vector<double> a);
  cplx product(cplx z) const;
};

struct AlePoint {
  cplx x, y, z;
};

double ale_residual(const AleConfig& cfg, const AlePoint& p);
// (x, y, z) -> ((-1)^l conj y, (-1)^l conj x, conj z).
AlePoint ale_real_structure(const AleConfig& cfg, const AlePoint& p);

// Random point with z and x drawn from the generator.
AlePoint random_ale_point(const AleConfig& cfg, std::mt19937_64& rng);
// Real points over the interval [a_{2i-1}, a_{2i}] (odd l) or, for even l,
// over [a_{2i}, a_{2i+1}]; index l for even l is the interval through infinity.
std::vector<AlePoint> ale_real_samples(const AleConfig& cfg, int index, int count);

// Odd l: lambda_i = a_{2i-1}, lambda'_i = a_{2i}, (u, v, z) = (x, -y, z).
BranchConfig odd_target(const AleConfig& cfg);
SurfacePoint map_odd(const AleConfig& cfg, const AlePoint& p);

// Even l: z' = psi(z) = 1 / (beta - z), which moves beta to infinity and keeps
// the orientation. With C = prod (beta - a_i) < 0, the leading coefficient of
// prod ((beta - a_i) z' - 1), the map
//   (u, v, z') = (c i z'^l x, -c i z'^l y, psi(z)),  c = 1 / sqrt(-C),
// carries x y = prod (z - a_i) onto u v = -f(z').
struct EvenMap {
  double beta = 0.0;
  double leading = 0.0;  // C
  double c = 0.0;
  BranchConfig target;
  double max_residual = 0.0;  // over the validation samples

  cplx psi(cplx z) const { return 1.0 / (beta - z); }
  cplx psi_inverse(cplx w) const { return beta - 1.0 / w; }
  SurfacePoint operator()(const AleConfig& cfg, const AlePoint& p) const;
};

// Throws NoSolution if the constant cannot be matched.
EvenMap map_even(const AleConfig& cfg, double beta, int validation_samples = 100,
                 unsigned long long seed = 1);

}  // namespace mtw
