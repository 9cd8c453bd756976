#include "mtw/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

constexpr double kPi = std::numbers::pi;

// Square root whose cut is the ray {t d : t > 0} for a unit complex d.
cplx sqrt_cut(cplx x, cplx d) { return std::sqrt(-d) * std::sqrt(x / (-d)); }

}  // namespace

BranchConfig BranchConfig::from_points(std::vector<double> pts) {
  if (pts.size() < 4 || pts.size() % 2 != 0)
    throw ConfigError("branch configuration needs an even number (>= 4) of points");
  for (size_t i = 0; i < pts.size(); ++i) {
    if (!std::isfinite(pts[i])) throw ConfigError("branch point is not finite");
    if (i > 0 && !(pts[i] > pts[i - 1]))
      throw ConfigError("branch points must be strictly increasing");
  }
  BranchConfig c;
  c.genus = static_cast<int>(pts.size()) / 2 - 1;
  c.points = std::move(pts);
  return c;
}

BranchConfig BranchConfig::parse(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int g = 0;
  if (!std::getline(in, line)) throw ConfigError("missing genus line");
  {
    std::istringstream ls(line);
    if (!(ls >> g) || g < 1) throw ConfigError("genus must be a positive integer");
  }
  if (!std::getline(in, line)) throw ConfigError("missing branch point line");
  std::istringstream ls(line);
  std::vector<double> pts;
  double x;
  while (ls >> x) pts.push_back(x);
  if (!ls.eof()) throw ConfigError("malformed branch point");
  if (static_cast<int>(pts.size()) != 2 * g + 2)
    throw ConfigError("expected 2g+2 branch points");
  return from_points(std::move(pts));
}

std::string BranchConfig::to_text() const {
  std::ostringstream out;
  out.precision(17);
  out << genus << "\n";
  for (size_t i = 0; i < points.size(); ++i) out << (i ? " " : "") << points[i];
  out << "\n";
  return out.str();
}

double BranchConfig::f(double z) const {
  double p = 1.0;
  for (double a : points) p *= (z - a);
  return p;
}

cplx BranchConfig::f(cplx z) const {
  cplx p = 1.0;
  for (double a : points) p *= (z - a);
  return p;
}

Poly BranchConfig::f_poly() const { return Poly::from_roots(points); }

int BranchConfig::interval_of(double x) const {
  for (int i = 1; i <= intervals(); ++i)
    if (x >= lambda(i) && x <= lambda_prime(i)) return i;
  return 0;
}

double BranchConfig::min_gap() const {
  double m = INFINITY;
  for (size_t i = 1; i < points.size(); ++i) m = std::min(m, points[i] - points[i - 1]);
  return m;
}

BranchConfig canonical_config(int genus) {
  switch (genus) {
    case 1: return BranchConfig::from_points({-2, -1, 1, 2});
    case 2: return BranchConfig::from_points({-5, -4, -2, -1, 1, 2});
    case 3: return BranchConfig::from_points({-7, -6, -4, -3, -1, 0, 2, 3});
    default: throw ConfigError("no canonical configuration for this genus");
  }
}

cplx eval_w(const BranchConfig& cfg, cplx z, Sheet sheet) {
  const double sgn = static_cast<double>(static_cast<int>(sheet));
  if (z.imag() == 0.0) {
    double x = z.real();
    for (double a : cfg.points)
      if (x == a) return 0.0;
    int i = cfg.interval_of(x);
    if (i > 0) {
      double s = ((cfg.genus + 1 - i) % 2 == 0) ? 1.0 : -1.0;
      return sgn * s * std::sqrt(-cfg.f(x));
    }
  }
  cplx p(0.0, -1.0);
  for (int j = 1; j <= cfg.intervals(); ++j)
    p *= std::sqrt(z - cfg.lambda(j)) * std::sqrt(z - cfg.lambda_prime(j));
  return sgn * p;
}

CurvePoint curve_point(const BranchConfig& cfg, cplx z, Sheet sheet) {
  CurvePoint p{z, eval_w(cfg, z, sheet), sheet};
  if (p.w == 0.0) p.sheet = Sheet::Plus;
  return p;
}

CurvePoint curve_point_with_w(const BranchConfig& cfg, cplx z, cplx w) {
  cplx plus = eval_w(cfg, z, Sheet::Plus);
  if (plus == 0.0) return CurvePoint{z, 0.0, Sheet::Plus};
  Sheet s = (std::abs(w - plus) <= std::abs(w + plus)) ? Sheet::Plus : Sheet::Minus;
  return CurvePoint{z, w, s};
}

CurvePoint involution(const BranchConfig& cfg, const CurvePoint& p) {
  if (is_ramification(cfg, p)) return p;
  return CurvePoint{p.z, -p.w, p.sheet == Sheet::Plus ? Sheet::Minus : Sheet::Plus};
}

bool is_ramification(const BranchConfig& cfg, const CurvePoint& p) {
  if (p.z.imag() != 0.0) return false;
  for (double a : cfg.points)
    if (p.z.real() == a) return true;
  return false;
}

double curve_residual(const BranchConfig& cfg, const CurvePoint& p) {
  double scale = 1.0;
  for (double a : cfg.points) scale *= (std::abs(p.z) + std::abs(a) + 1.0);
  return std::abs(p.w * p.w + cfg.f(p.z)) / scale;
}

VectorXcd holomorphic_basis(const BranchConfig& cfg, const CurvePoint& p) {
  if (p.w == 0.0) throw RamificationPoint("holomorphic basis evaluated at a ramification point");
  VectorXcd v(cfg.genus);
  cplx zp = 1.0;
  for (int j = 0; j < cfg.genus; ++j) {
    v[j] = zp / p.w;
    zp *= p.z;
  }
  return v;
}

CyclePath make_cycle(const BranchConfig& cfg, CycleKind kind, int index) {
  double a, b;
  if (kind == CycleKind::RealCircle) {
    if (index < 1 || index > cfg.intervals()) throw ConfigError("real circle index out of range");
    a = cfg.lambda(index);
    b = cfg.lambda_prime(index);
  } else {
    if (index < 1 || index > cfg.genus) throw ConfigError("gap cycle index out of range");
    a = cfg.lambda_prime(index);
    b = cfg.lambda(index + 1);
  }
  return CyclePath{kind, index, {{a, b, Sheet::Plus}, {b, a, Sheet::Minus}}};
}

EmbeddedPoint embed(const BranchConfig& cfg, const CurvePoint& p, Ambient ambient) {
  const int g = cfg.genus;
  VectorXcd c = VectorXcd::Zero(ambient == Ambient::CP_g2 ? g + 3 : g + 4);
  cplx zp = 1.0;
  for (int j = 0; j <= g + 1; ++j) {
    c[j] = zp;
    zp *= p.z;
  }
  c[g + 2] = p.w;
  return EmbeddedPoint{c, ambient};
}

// ---------------------------------------------------------------------------

RealCircle::RealCircle(const BranchConfig& cfg, int index) : cfg_(cfg), index_(index) {
  if (index < 1 || index > cfg.intervals()) throw ConfigError("real circle index out of range");
  const double a = cfg.lambda(index), b = cfg.lambda_prime(index);
  m_ = 0.5 * (a + b);
  h_ = 0.5 * (b - a);
  s_ = ((cfg.genus + 1 - index) % 2 == 0) ? 1.0 : -1.0;

  const int g = cfg.genus;
  // Cosine coefficients of the smooth integrand; sample count doubles until
  // the tail is negligible.
  for (int M = 32;; M *= 2) {
    MatrixXd vals(g, M);
    for (int k = 0; k < M; ++k) vals.col(k) = integrand(2.0 * kPi * k / M);
    const int N = M / 2 - 1;
    a0_ = vals.rowwise().mean();
    an_.resize(g, N);
    for (int n = 1; n <= N; ++n) {
      VectorXd acc = VectorXd::Zero(g);
      for (int k = 0; k < M; ++k) acc += vals.col(k) * std::cos(2.0 * kPi * n * k / M);
      an_.col(n - 1) = acc * (2.0 / M);
    }
    double scale = std::max(a0_.cwiseAbs().maxCoeff(), an_.cwiseAbs().maxCoeff());
    double tail = an_.rightCols(std::min(N, 4)).cwiseAbs().maxCoeff();
    if (tail < 4e-16 * scale * std::sqrt(static_cast<double>(M))) {
      // Drop coefficients that are pure roundoff.
      int keep = N;
      while (keep > 1 && an_.col(keep - 1).cwiseAbs().maxCoeff() < 1e-18 * scale) --keep;
      an_.conservativeResize(g, keep);
      break;
    }
    if (M >= 1 << 14) throw QuadratureFailure("cosine series of the circle integrand did not converge");
  }
}

double RealCircle::z(double phi) const { return m_ - h_ * std::cos(phi); }

double RealCircle::g_factor(double z) const {
  double p = 1.0;
  for (int j = 1; j <= cfg_.intervals(); ++j) {
    if (j == index_) continue;
    p *= (z - cfg_.lambda(j)) * (z - cfg_.lambda_prime(j));
  }
  return p;
}

double RealCircle::g_log_derivative(double z) const {
  double s = 0.0;
  for (int j = 1; j <= cfg_.intervals(); ++j) {
    if (j == index_) continue;
    double a = cfg_.lambda(j), b = cfg_.lambda_prime(j);
    s += (2.0 * z - a - b) / ((z - a) * (z - b));
  }
  return s;
}

double RealCircle::w(double phi) const {
  return s_ * h_ * std::sin(phi) * std::sqrt(g_factor(z(phi)));
}

double RealCircle::dz(double phi) const { return h_ * std::sin(phi); }

double RealCircle::dw(double phi) const {
  const double zz = z(phi);
  const double sg = std::sqrt(g_factor(zz));
  const double sp = std::sin(phi);
  return s_ * h_ * (std::cos(phi) * sg + sp * sg * 0.5 * g_log_derivative(zz) * h_ * sp);
}

CurvePoint RealCircle::point(double phi) const {
  double zz = z(phi);
  double ww = w(phi);
  double c = std::cos(phi);
  if (c == 1.0) return CurvePoint{cfg_.lambda(index_), 0.0, Sheet::Plus};
  if (c == -1.0) return CurvePoint{cfg_.lambda_prime(index_), 0.0, Sheet::Plus};
  if (ww == 0.0) return CurvePoint{zz, 0.0, Sheet::Plus};
  Sheet s = (std::sin(std::remainder(phi, 2.0 * kPi)) > 0) ? Sheet::Plus : Sheet::Minus;
  return CurvePoint{zz, ww, s};
}

double RealCircle::angle_of(double z, double w) const {
  double c = std::clamp((m_ - z) / h_, -1.0, 1.0);
  double phi = std::acos(c);
  if (w * s_ < 0.0) phi = -phi;
  return phi;
}

VectorXd RealCircle::integrand(double phi) const {
  const int g = cfg_.genus;
  const double zz = z(phi);
  const double inv = s_ / std::sqrt(g_factor(zz));
  VectorXd v(g);
  double zp = 1.0;
  for (int j = 0; j < g; ++j) {
    v[j] = zp * inv;
    zp *= zz;
  }
  return v;
}

VectorXd RealCircle::increment(double phi) const {
  VectorXd r = a0_ * phi;
  const cplx step = std::polar(1.0, phi);
  cplx e = step;
  for (int n = 1; n <= an_.cols(); ++n) {
    r += an_.col(n - 1) * (e.imag() / n);
    e *= step;
  }
  return r;
}

VectorXd RealCircle::embed(double phi) const {
  const int g = cfg_.genus;
  VectorXd v(g + 3);
  const double zz = z(phi);
  double zp = 1.0;
  for (int j = 0; j <= g + 1; ++j) {
    v[j] = zp;
    zp *= zz;
  }
  v[g + 2] = w(phi);
  return v;
}

VectorXd RealCircle::embed_derivative(double phi) const {
  const int g = cfg_.genus;
  VectorXd v(g + 3);
  const double zz = z(phi);
  const double d = dz(phi);
  v[0] = 0.0;
  double zp = 1.0;
  for (int j = 1; j <= g + 1; ++j) {
    v[j] = j * zp * d;
    zp *= zz;
  }
  v[g + 2] = dw(phi);
  return v;
}

// ---------------------------------------------------------------------------

VectorXcd gap_half_period(const BranchConfig& cfg, int index) {
  const int g = cfg.genus;
  const double a = cfg.lambda_prime(index), b = cfg.lambda(index + 1);
  const double m = 0.5 * (a + b), h = 0.5 * (b - a);
  // f = (z-a)(z-b) * rest; on the gap f > 0 and rest < 0. With
  // z = m - h cos(phi), sqrt(f) = h sin(phi) sqrt(-rest).
  auto rest = [&](double z) {
    double p = 1.0;
    for (double c : cfg.points)
      if (c != a && c != b) p *= (z - c);
    return p;
  };
  auto integrand = [&](double phi) {
    const double z = m - h * std::cos(phi);
    const double inv = 1.0 / std::sqrt(-rest(z));
    VectorXd v(g);
    double zp = 1.0;
    for (int j = 0; j < g; ++j) {
      v[j] = zp * inv;
      zp *= z;
    }
    return v;
  };
  // Trapezoid rule on [0, pi] for an even periodic integrand.
  VectorXd prev;
  for (int M = 32;; M *= 2) {
    VectorXd acc = 0.5 * (integrand(0.0) + integrand(kPi));
    for (int k = 1; k < M; ++k) acc += integrand(kPi * k / M);
    acc *= kPi / M;
    if (prev.size() && (acc - prev).norm() < 1e-15 * acc.norm()) {
      // w on the gap (sheet +) is -i s sqrt(f) with s = (-1)^{g+1-index}.
      const double s = ((g + 1 - index) % 2 == 0) ? 1.0 : -1.0;
      return VectorXcd(acc.cast<cplx>() * cplx(0.0, s));
    }
    prev = acc;
    if (M >= 1 << 16) throw QuadratureFailure("gap integral did not converge");
  }
}

VectorXcd segment_integral(const BranchConfig& cfg, cplx a, cplx b, double t_ref,
                           cplx w_ref) {
  const int g = cfg.genus;
  const cplx dir = b - a;
  if (std::abs(dir) == 0.0) return VectorXcd::Zero(g);
  const cplx mid = 0.5 * (a + b);
  // One cut direction per branch point, pointing away from the segment.
  std::vector<cplx> cut(cfg.points.size());
  for (size_t c = 0; c < cfg.points.size(); ++c) {
    cplx d = mid - cfg.points[c];
    cut[c] = (std::abs(d) > 0) ? -d / std::abs(d) : cplx(-1.0, 0.0);
  }
  auto is_root = [&](cplx z) {
    for (size_t c = 0; c < cfg.points.size(); ++c)
      if (z == cplx(cfg.points[c], 0.0)) return static_cast<int>(c);
    return -1;
  };
  const int ra = is_root(a), rb = is_root(b);

  // w on the segment up to a global sign, with the factor of the root at
  // `skip` omitted (it is handled by the substitution).
  auto w_partial = [&](cplx z, int skip) {
    cplx p(0.0, 1.0);
    for (size_t c = 0; c < cfg.points.size(); ++c)
      if (static_cast<int>(c) != skip) p *= sqrt_cut(z - cfg.points[c], cut[c]);
    return p;
  };
  // Fix the global sign from the reference value.
  cplx sign = 1.0;
  {
    cplx zr = a + t_ref * dir;
    cplx wr = w_partial(zr, -1);
    if (std::abs(w_ref) > 0.0 && std::abs(wr) > 0.0)
      sign = (std::abs(w_ref - wr) <= std::abs(w_ref + wr)) ? 1.0 : -1.0;
  }

  VectorXcd out(g);
  for (int j = 0; j < g; ++j) {
    auto power = [j](cplx z) {
      cplx r = 1.0;
      for (int k = 0; k < j; ++k) r *= z;
      return r;
    };
    // First half: t in [0, 1/2], second half: t in [1/2, 1].
    auto first = [&](double s) -> cplx {
      if (ra >= 0) {
        // t = s^2: dz = 2 dir s ds and sqrt(z - a) = s sqrt(dir).
        const cplx z = a + dir * (s * s);
        return 2.0 * dir * power(z) /
               (sign * w_partial(z, ra) * sqrt_cut(dir, cut[ra]));
      }
      const cplx z = a + dir * s;
      return dir * power(z) / (sign * w_partial(z, -1));
    };
    auto second = [&](double s) -> cplx {
      if (rb >= 0) {
        // t = 1 - s^2: dz = -2 dir s ds and sqrt(z - b) = s sqrt(-dir).
        const cplx z = b - dir * (s * s);
        return 2.0 * dir * power(z) /
               (sign * w_partial(z, rb) * sqrt_cut(-dir, cut[rb]));
      }
      const cplx z = b - dir * s;
      return dir * power(z) / (sign * w_partial(z, -1));
    };
    const double ua = (ra >= 0) ? std::sqrt(0.5) : 0.5;
    const double ub = (rb >= 0) ? std::sqrt(0.5) : 0.5;
    double e1 = 0, e2 = 0, l1 = 0, l2 = 0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    cplx i1 = GK::integrate(first, 0.0, ua, 20, 1e-14, &e1, &l1);
    cplx i2 = GK::integrate(second, 0.0, ub, 20, 1e-14, &e2, &l2);
    const double err = e1 + e2, mag = std::max(l1 + l2, 1e-300);
    if (!std::isfinite(err) || err > 1e-7 * mag)
      throw QuadratureFailure("segment integral did not reach tolerance");
    out[j] = i1 + i2;
  }
  return out;
}

VectorXcd integrate_segment(const BranchConfig& cfg, const CurvePoint& from,
                            const CurvePoint& to) {
  if (from.w != 0.0) return segment_integral(cfg, from.z, to.z, 0.0, from.w);
  if (to.w != 0.0) return segment_integral(cfg, from.z, to.z, 1.0, to.w);
  const cplx mid = 0.5 * (from.z + to.z);
  return segment_integral(cfg, from.z, to.z, 0.5, eval_w(cfg, mid, from.sheet));
}

VectorXcd integrate_basis(const BranchConfig& cfg, const CyclePath& path) {
  if (path.segments.size() == 2 && path.segments[0].sheet == Sheet::Plus &&
      path.segments[1].sheet == Sheet::Minus) {
    if (path.kind == CycleKind::RealCircle)
      return RealCircle(cfg, path.index).period().cast<cplx>();
    return 2.0 * gap_half_period(cfg, path.index);
  }
  VectorXcd acc = VectorXcd::Zero(cfg.genus);
  for (const auto& s : path.segments) {
    const cplx mid(0.5 * (s.from + s.to), 0.0);
    acc += segment_integral(cfg, s.from, s.to, 0.5, eval_w(cfg, mid, s.sheet));
  }
  return acc;
}

}  // namespace mtw
