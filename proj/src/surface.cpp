#include "mtw/surface.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx prod_roots(const std::vector<double>& roots, cplx z) {
  cplx p = 1.0;
  for (double r : roots) p *= (z - r);
  return p;
}

// Roots of a complex polynomial (ascending coefficients), polished by Newton.
std::vector<cplx> complex_roots(VectorXcd c) {
  int n = static_cast<int>(c.size()) - 1;
  const double scale = c.cwiseAbs().maxCoeff();
  while (n > 0 && std::abs(c[n]) <= 1e-14 * scale) --n;
  std::vector<cplx> out;
  if (n < 1) return out;
  MatrixXcd comp = MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
  Eigen::ComplexEigenSolver<MatrixXcd> es(comp, false);
  auto eval = [&](cplx z, cplx& d) {
    cplx p = 0.0;
    d = 0.0;
    for (int i = n; i >= 0; --i) {
      d = d * z + p;
      p = p * z + c[i];
    }
    return p;
  };
  for (int i = 0; i < n; ++i) {
    cplx z = es.eigenvalues()[i], d;
    for (int it = 0; it < 4; ++it) {
      cplx p = eval(z, d);
      cplx step = p / d;
      cplx dd;
      if (!std::isfinite(std::abs(step)) || std::abs(eval(z - step, dd)) >= std::abs(p)) break;
      z -= step;
    }
    out.push_back(z);
  }
  return out;
}

CP1 pick(cplx a1, cplx b1, cplx a2, cplx b2) {
  if (std::norm(a1) + std::norm(b1) >= std::norm(a2) + std::norm(b2)) return CP1{a1, b1};
  return CP1{a2, b2};
}

// Size of the terms of p at x, used to judge relative smallness.
double term_scale(const Poly& p, double x) {
  double s = 0.0, xp = 1.0;
  for (int j = 0; j < p.coeffs().size(); ++j) {
    s += std::abs(p.coeffs()[j]) * xp;
    xp *= std::abs(x);
  }
  return s;
}

}  // namespace

SurfacePoint SurfacePoint::from_zwy(cplx z, cplx w, cplx y) {
  SurfacePoint p;
  p.z = z;
  p.u = y + cplx(0.0, 1.0) * w;
  p.v = y - cplx(0.0, 1.0) * w;
  return p;
}

double surface_residual(const BranchConfig& cfg, const SurfacePoint& p) {
  if (p.chart != SurfacePoint::Chart::Affine) return 0.0;
  const cplx f = cfg.f(p.z);
  return std::abs(p.u * p.v + f) / (1.0 + std::abs(f) + std::abs(p.u) * std::abs(p.v));
}

SurfacePoint real_structure(const SurfacePoint& p) {
  SurfacePoint q;
  q.z = std::conj(p.z);
  q.u = std::conj(p.v);
  q.v = std::conj(p.u);
  switch (p.chart) {
    case SurfacePoint::Chart::Affine: q.chart = p.chart; break;
    case SurfacePoint::Chart::Infinity: q.chart = SurfacePoint::Chart::ConjugateInfinity; break;
    case SurfacePoint::Chart::ConjugateInfinity: q.chart = SurfacePoint::Chart::Infinity; break;
  }
  return q;
}

bool is_real(const SurfacePoint& p, double tol) {
  if (p.chart != SurfacePoint::Chart::Affine) return false;
  const double s = 1.0 + std::abs(p.z) + std::abs(p.u);
  return std::abs(p.z.imag()) <= tol * s && std::abs(p.u - std::conj(p.v)) <= tol * s;
}

int real_sphere_of(const BranchConfig& cfg, const SurfacePoint& p, double tol) {
  if (!is_real(p, tol)) return 0;
  const double z = p.z.real();
  for (int i = 1; i <= cfg.intervals(); ++i) {
    const double pad = tol * (1.0 + std::abs(z));
    if (z >= cfg.lambda(i) - pad && z <= cfg.lambda_prime(i) + pad) return i;
  }
  return 0;
}

std::array<SurfacePoint, 2> lift_to_surface(const BranchConfig& cfg, cplx z, cplx w) {
  const cplx y = std::sqrt(-cfg.f(z) - w * w);
  return {SurfacePoint::from_zwy(z, w, y), SurfacePoint::from_zwy(z, w, -y)};
}

SurfacePoint s1_act(double theta, const SurfacePoint& p) {
  SurfacePoint q = p;
  const cplx e = std::polar(1.0, theta);
  q.u = e * p.u;
  q.v = std::conj(e) * p.v;
  return q;
}

VectorXd s1_act(double theta, const VectorXd& coeffs) {
  VectorXd c = coeffs;
  const int n = static_cast<int>(c.size());
  const double cw = coeffs[n - 2], cy = coeffs[n - 1];
  const double co = std::cos(theta), si = std::sin(theta);
  c[n - 2] = co * cw + si * cy;
  c[n - 1] = -si * cw + co * cy;
  return c;
}

VectorXd pullback(const RealHyperplane& h) {
  VectorXd c(h.coeffs.size() + 1);
  c.head(h.coeffs.size()) = h.coeffs;
  c[h.coeffs.size()] = 0.0;
  return c;
}

VectorXcd surface_embed(int genus, const SurfacePoint& p) {
  VectorXcd m(genus + 4);
  cplx zp = 1.0;
  for (int j = 0; j <= genus + 1; ++j) {
    m[j] = zp;
    zp *= p.z;
  }
  m[genus + 2] = p.w();
  m[genus + 3] = p.y();
  return m;
}

std::string to_string(LineKind k) {
  switch (k) {
    case LineKind::Regular: return "regular";
    case LineKind::Irregular: return "irregular";
    case LineKind::Boundary: return "boundary";
  }
  return "unknown";
}

Poly section_polynomial(const BranchConfig& cfg, const VectorXd& coeffs) {
  const int g = cfg.genus;
  Poly P(coeffs.head(g + 2));
  const double r2 = coeffs[g + 2] * coeffs[g + 2] + coeffs[g + 3] * coeffs[g + 3];
  return P * P + cfg.f_poly() * r2;
}

MinitwistorLine build_line(const BranchConfig& cfg, const VectorXd& coeffs_in, int circle_samples) {
  const int g = cfg.genus;
  if (coeffs_in.size() != g + 4) throw ConfigError("hyperplane needs g+4 coefficients");
  MinitwistorLine line;
  line.coeffs = coeffs_in / coeffs_in.norm();
  const VectorXd& c = line.coeffs;
  Poly P(c.head(g + 2));
  const double cw = c[g + 2], cy = c[g + 3];
  const double r = std::hypot(cw, cy);
  auto near_branch = [&](double x, double b) { return std::abs(x - b) <= 1e-8 * (1.0 + std::abs(b)); };

  if (r < 1e-12) {
    // Section through the cone vertex: fibers over the roots of P.
    std::vector<cplx> roots = P.roots();
    if (static_cast<int>(roots.size()) != g + 1) throw NotInFamily("degenerate section");
    std::vector<double> xs;
    for (cplx z : roots) {
      if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z))) throw NotInFamily("non-real fiber");
      xs.push_back(z.real());
    }
    std::sort(xs.begin(), xs.end());
    for (int i = 1; i <= g; ++i) {
      const double x = xs[i - 1];
      double b;
      if (near_branch(x, cfg.lambda(i)))
        b = cfg.lambda(i);
      else if (near_branch(x, cfg.lambda_prime(i)))
        b = cfg.lambda_prime(i);
      else
        throw NotInFamily("fiber does not pass a branch point of the expected interval");
      line.line_feet.push_back(b);
      line.nodes.push_back(RealPoint{b, 0.0, 0.0});
    }
    const double lam = xs[g];
    if (cfg.interval_of(lam) != g + 1 && !near_branch(lam, cfg.lambda(g + 1)) &&
        !near_branch(lam, cfg.lambda_prime(g + 1)))
      throw NotInFamily("conic is not over the last interval");
    line.kind = LineKind::Irregular;
    line.conic_z = std::clamp(lam, cfg.lambda(g + 1), cfg.lambda_prime(g + 1));
    line.arc_lo = line.arc_hi = line.conic_z;
    const double rad = std::sqrt(std::max(0.0, -cfg.f(line.conic_z)));
    for (int s = 0; s < circle_samples; ++s) {
      const double t = kTwoPi * s / circle_samples;
      line.circle.push_back(RealPoint{line.conic_z, rad * std::cos(t), rad * std::sin(t)});
    }
    return line;
  }

  const Poly H = section_polynomial(cfg, c);
  const Poly dH = H.derivative();
  const Poly ddH = dH.derivative();
  std::vector<double> node_z;
  double margin = INFINITY;
  for (cplx zc : dH.roots()) {
    if (std::abs(zc.imag()) > 1e-6 * (1.0 + std::abs(zc))) continue;
    double x = zc.real();
    for (int it = 0; it < 3; ++it) {
      const double d2 = ddH(x);
      if (d2 == 0.0) break;
      x -= dH(x) / d2;
    }
    const int i = cfg.interval_of(x);
    if (i == 0) continue;
    if (std::abs(H(x)) > 1e-8 * term_scale(H, x)) continue;
    const double curv = ddH(x) / term_scale(ddH, x);
    if (curv <= 0.0) continue;
    node_z.push_back(x);
    margin = std::min(margin, curv);
  }
  std::sort(node_z.begin(), node_z.end());
  std::vector<int> per(g + 2, 0);
  for (double x : node_z) ++per[cfg.interval_of(x)];

  for (double x : node_z) {
    const double s = -P(x) / (r * r);
    line.nodes.push_back(RealPoint{x, s * cw, s * cy});
  }
  line.node_margin = node_z.empty() ? 0.0 : margin;

  bool first_g = true;
  for (int i = 1; i <= g; ++i) first_g = first_g && per[i] == 1;
  if (!first_g) throw NotInFamily("section is not tangent once to each of the first g spheres");

  if (static_cast<int>(node_z.size()) == g + 1 && per[g + 1] == 1) {
    line.kind = LineKind::Boundary;
    line.arc_lo = line.arc_hi = node_z.back();
    return line;
  }
  if (static_cast<int>(node_z.size()) != g) throw NotInFamily("unexpected number of tangencies");

  Poly R = H;
  for (double x : node_z) R = R.deflate(x).deflate(x);
  std::vector<cplx> ends = R.roots();
  if (ends.size() != 2) throw NotInFamily("residual intersection is not a pair");
  for (cplx e : ends)
    if (std::abs(e.imag()) > 1e-8 * (1.0 + std::abs(e))) throw NotInFamily("real circle is empty");
  double lo = std::min(ends[0].real(), ends[1].real());
  double hi = std::max(ends[0].real(), ends[1].real());
  // Deflation loses accuracy; polish the simple roots on H itself.
  for (double* x : {&lo, &hi}) {
    for (int it = 0; it < 3; ++it) {
      const double d1 = dH(*x);
      if (d1 == 0.0) break;
      *x -= H(*x) / d1;
    }
  }
  const double pad = 1e-9 * (1.0 + std::abs(cfg.lambda_prime(g + 1)));
  if (lo < cfg.lambda(g + 1) - pad || hi > cfg.lambda_prime(g + 1) + pad)
    throw NotInFamily("real circle leaves the last interval");
  lo = std::max(lo, cfg.lambda(g + 1));
  hi = std::min(hi, cfg.lambda_prime(g + 1));
  line.kind = LineKind::Regular;
  line.arc_lo = lo;
  line.arc_hi = hi;

  // In the frame rotated by (c_w, c_y) the circle is z = m + d cos(psi),
  // rotated w = sqrt(a) / r prod (z - z_i) d sin(psi).
  const double a = H.coeffs()[H.degree()];
  const double m = 0.5 * (lo + hi), d = 0.5 * (hi - lo);
  for (int s = 0; s < circle_samples; ++s) {
    const double psi = kTwoPi * s / circle_samples;
    const double z = m + d * std::cos(psi);
    double prod = 1.0;
    for (double x : node_z) prod *= (z - x);
    const double yt = -P(z) / r;
    const double wt = std::sqrt(a) / r * prod * d * std::sin(psi);
    line.circle.push_back(RealPoint{z, (cw * yt - cy * wt) / r, (cy * yt + cw * wt) / r});
  }
  return line;
}

// ---------------------------------------------------------------------------

bool CP1::is_zero(double tol) const { return std::abs(a) <= tol * std::abs(b); }
bool CP1::is_infinity(double tol) const { return std::abs(b) <= tol * std::abs(a); }

QuadricCover::QuadricCover(const BranchConfig& cfg, const BoundaryData& data, bool hatted)
    : cfg_(cfg), data_(data), hatted_(hatted) {
  const int g = cfg.genus;
  if (data.genus() != g) throw ConfigError("boundary data genus mismatch");
  for (int i = 1; i <= g; ++i) {
    const Ramification& r = data.rho[i - 1];
    a_.push_back(r.prime ? cfg.lambda_prime(i) : cfg.lambda(i));
    b_.push_back(r.prime ? cfg.lambda(i) : cfg.lambda_prime(i));
  }
  a_.push_back(hatted ? cfg.lambda_prime(g + 1) : cfg.lambda(g + 1));
  b_.push_back(hatted ? cfg.lambda(g + 1) : cfg.lambda_prime(g + 1));
}

cplx QuadricCover::prod_a(cplx z) const { return prod_roots(a_, z); }
cplx QuadricCover::prod_b(cplx z) const { return prod_roots(b_, z); }

QuadricImage QuadricCover::project(const SurfacePoint& p) const {
  switch (p.chart) {
    case SurfacePoint::Chart::Infinity: return {CP1{0.0, 1.0}, CP1{0.0, 1.0}};
    case SurfacePoint::Chart::ConjugateInfinity: return {CP1{1.0, 0.0}, CP1{1.0, 0.0}};
    case SurfacePoint::Chart::Affine: break;
  }
  const cplx A = prod_a(p.z), B = prod_b(p.z);
  // first = A / u = -v / B, second = v / A = -B / u.
  return {pick(A, p.u, -p.v, B), pick(p.v, A, -B, p.u)};
}

std::vector<SurfacePoint> QuadricCover::fiber(cplx q1, cplx q2) const {
  const Poly A = Poly::from_roots(a_), B = Poly::from_roots(b_);
  VectorXcd c(A.coeffs().size());
  for (int j = 0; j < c.size(); ++j) c[j] = q1 * B.coeff(j) + q2 * A.coeff(j);
  std::vector<SurfacePoint> out;
  for (cplx z : complex_roots(c)) {
    SurfacePoint p;
    p.z = z;
    p.u = prod_a(z) / q1;
    p.v = -q1 * prod_b(z);
    out.push_back(p);
  }
  return out;
}

VectorXd QuadricCover::boundary_coeffs(cplx q1) const {
  const int g = cfg_.genus;
  const double rho = std::abs(q1), alpha = std::arg(q1);
  const Poly A = Poly::from_roots(a_), B = Poly::from_roots(b_);
  VectorXd c(g + 4);
  for (int j = 0; j <= g + 1; ++j) c[j] = rho * B.coeff(j) - A.coeff(j) / rho;
  c[g + 2] = -2.0 * std::sin(alpha);
  c[g + 3] = 2.0 * std::cos(alpha);
  return c / c.norm();
}

MinitwistorLine QuadricCover::boundary_section(cplx q1) const {
  return build_line(cfg_, boundary_coeffs(q1));
}

QuadricImage target_real_structure(const QuadricImage& q) {
  return {CP1{std::conj(q.second.b), std::conj(q.second.a)},
          CP1{std::conj(q.first.b), std::conj(q.first.a)}};
}

}  // namespace mtw
