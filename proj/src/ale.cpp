#include "mtw/ale.hpp"

#include <cmath>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

AlePoint real_point(const AleConfig& cfg, double z, double phase) {
  const double p = cfg.product(z).real();
  const double sgn = (cfg.l % 2 == 0) ? 1.0 : -1.0;
  const cplx x = std::polar(std::sqrt(std::max(0.0, sgn * p)), phase);
  return AlePoint{x, sgn * std::conj(x), z};
}

}  // namespace

AleConfig AleConfig::make(std::vector<double> a) {
  if (a.size() < 2 || a.size() % 2 != 0) throw ConfigError("ALE configuration needs 2l points");
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) throw ConfigError("ALE parameter is not finite");
    if (i > 0 && !(a[i] > a[i - 1])) throw ConfigError("ALE parameters must be strictly increasing");
  }
  AleConfig c;
  c.l = static_cast<int>(a.size()) / 2;
  c.a = std::move(a);
  return c;
}

cplx AleConfig::product(cplx z) const {
  cplx p = 1.0;
  for (double ai : a) p *= (z - ai);
  return p;
}

double ale_residual(const AleConfig& cfg, const AlePoint& p) {
  const cplx f = cfg.product(p.z);
  return std::abs(p.x * p.y - f) / (1.0 + std::abs(f) + std::abs(p.x) * std::abs(p.y));
}

AlePoint ale_real_structure(const AleConfig& cfg, const AlePoint& p) {
  const double s = (cfg.l % 2 == 0) ? 1.0 : -1.0;
  return AlePoint{s * std::conj(p.y), s * std::conj(p.x), std::conj(p.z)};
}

AlePoint random_ale_point(const AleConfig& cfg, std::mt19937_64& rng) {
  const double lo = cfg.a.front(), hi = cfg.a.back();
  const double span = hi - lo;
  const cplx z(lo - 0.25 * span + 1.5 * span * uniform01(rng), -span + 2.0 * span * uniform01(rng));
  const cplx x = std::polar(0.2 + 2.0 * uniform01(rng), 2.0 * std::numbers::pi * uniform01(rng)) *
                 std::sqrt(std::abs(cfg.product(z)));
  return AlePoint{x, cfg.product(z) / x, z};
}

std::vector<AlePoint> ale_real_samples(const AleConfig& cfg, int index, int count) {
  const int l = cfg.l;
  if (index < 1 || index > l) throw ConfigError("real sphere index out of range");
  std::vector<AlePoint> out;
  for (int k = 0; k < count; ++k) {
    const double t = (k + 0.5) / count;
    const double phase = 2.0 * std::numbers::pi * ((k * 7) % count) / count;
    double z;
    if (l % 2 == 1) {
      z = cfg.a[2 * index - 2] + t * (cfg.a[2 * index - 1] - cfg.a[2 * index - 2]);
    } else if (index < l) {
      z = cfg.a[2 * index - 1] + t * (cfg.a[2 * index] - cfg.a[2 * index - 1]);
    } else {
      // Through infinity: beyond a_{2l}, then below a_1.
      z = t < 0.5 ? cfg.a.back() + t / (0.5 - t) : cfg.a.front() - (1.0 - t) / (t - 0.5);
    }
    out.push_back(real_point(cfg, z, phase));
  }
  return out;
}

BranchConfig odd_target(const AleConfig& cfg) {
  if (cfg.l % 2 != 1) throw ConfigError("odd map needs odd l");
  if (cfg.l < 2) throw ConfigError("target curve needs l >= 2");
  return BranchConfig::from_points(cfg.a);
}

SurfacePoint map_odd(const AleConfig& cfg, const AlePoint& p) {
  if (cfg.l % 2 != 1) throw ConfigError("odd map needs odd l");
  SurfacePoint s;
  s.z = p.z;
  s.u = p.x;
  s.v = -p.y;
  return s;
}

SurfacePoint EvenMap::operator()(const AleConfig& cfg, const AlePoint& p) const {
  const cplx zp = psi(p.z);
  const cplx t = cplx(0.0, c) * std::pow(zp, cfg.l);
  SurfacePoint s;
  s.z = zp;
  s.u = t * p.x;
  s.v = -t * p.y;
  return s;
}

EvenMap map_even(const AleConfig& cfg, double beta, int validation_samples, unsigned long long seed) {
  if (cfg.l % 2 != 0) throw ConfigError("even map needs even l");
  if (!(beta > cfg.a[0] && beta < cfg.a[1])) throw ConfigError("beta must lie in (a_1, a_2)");
  EvenMap m;
  m.beta = beta;
  const int n = static_cast<int>(cfg.a.size());
  std::vector<double> images(n);
  for (int i = 0; i < n; ++i) images[i] = 1.0 / (beta - cfg.a[i]);
  // lambda_i = psi(a_{2i}), lambda'_i = psi(a_{2i+1}), lambda'_l = psi(a_1).
  std::vector<double> pts;
  for (int i = 1; i < n; ++i) pts.push_back(images[i]);
  pts.push_back(images[0]);
  m.target = BranchConfig::from_points(pts);
  // Leading coefficient of prod ((beta - a_i) z' - 1).
  Poly prod(VectorXd::Ones(1));
  for (double ai : cfg.a) {
    VectorXd lin(2);
    lin << -1.0, beta - ai;
    prod = prod * Poly(lin);
  }
  m.leading = prod.coeffs()[prod.degree()];
  if (!(m.leading < 0.0)) throw NoSolution("leading coefficient has the wrong sign");
  m.c = 1.0 / std::sqrt(-m.leading);
  std::mt19937_64 rng(seed);
  for (int k = 0; k < validation_samples; ++k) {
    const AlePoint p = random_ale_point(cfg, rng);
    m.max_residual = std::max(m.max_residual, surface_residual(m.target, m(cfg, p)));
  }
  if (!(m.max_residual < 1e-10)) throw NoSolution("transported equation does not match");
  return m;
}

}  // namespace mtw
