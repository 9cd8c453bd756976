#include "mtw/einstein_weyl.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include <boost/math/tools/roots.hpp>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

VectorXd unit(const VectorXd& v) { return v / v.norm(); }

VectorXd big_row(const VectorXd& small, double y) {
  VectorXd r(small.size() + 1);
  r.head(small.size()) = small;
  r[small.size()] = y;
  return r;
}

// Orthonormal complement of the rows of R (returned as columns).
MatrixXd null_columns(const MatrixXd& R, int dim) {
  Eigen::JacobiSVD<MatrixXd> svd(R, Eigen::ComputeFullV);
  const int n = static_cast<int>(R.cols());
  return svd.matrixV().rightCols(dim).leftCols(std::min(dim, n));
}

MatrixXd tangent_from_rows(const std::vector<VectorXd>& node_rows, const VectorXd& coeffs) {
  MatrixXd R(node_rows.size() + 1, coeffs.size());
  for (size_t i = 0; i < node_rows.size(); ++i) R.row(i) = unit(node_rows[i]).transpose();
  R.row(node_rows.size()) = unit(coeffs).transpose();
  return null_columns(R, 3);
}

// Portable uniform draw in [0, 1).
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double wrap_4pi(double d) { return std::remainder(d, 2.0 * kTwoPi); }

struct Seg {
  double x0, y0, x1, y1;
};

double orient(double ax, double ay, double bx, double by, double cx, double cy) {
  return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
}

bool segments_cross(const Seg& a, const Seg& b) {
  const double d1 = orient(a.x0, a.y0, a.x1, a.y1, b.x0, b.y0);
  const double d2 = orient(a.x0, a.y0, a.x1, a.y1, b.x1, b.y1);
  const double d3 = orient(b.x0, b.y0, b.x1, b.y1, a.x0, a.y0);
  const double d4 = orient(b.x0, b.y0, b.x1, b.y1, a.x1, a.y1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 &&
         d4 != 0;
}

double point_segment(double px, double py, const Seg& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double L = dx * dx + dy * dy;
  double t = L > 0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / L : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(px - s.x0 - t * dx, py - s.y0 - t * dy);
}

double segment_distance(const Seg& a, const Seg& b) {
  if (segments_cross(a, b)) return 0.0;
  return std::min({point_segment(a.x0, a.y0, b), point_segment(a.x1, a.y1, b),
                   point_segment(b.x0, b.y0, a), point_segment(b.x1, b.y1, a)});
}

}  // namespace

bool EWPoint::on_axis(double tol) const { return std::abs(std::remainder(u, kTwoPi)) < tol; }

VectorXd ew_chart(const SeifertFamily& fam, const EWPoint& p) {
  SeifertPoint sp = fam.at(p.u, p.v);
  return unit(s1_act(p.theta, pullback(fam.hyperplane(sp))));
}

VectorXd axis_hyperplane(const SeifertFamily& fam, bool primed, double lam) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int g = cfg.genus;
  std::vector<double> roots;
  for (int i = 1; i <= g; ++i) {
    const bool p = fam.data().rho[i - 1].prime != primed;
    roots.push_back(p ? cfg.lambda_prime(i) : cfg.lambda(i));
  }
  roots.push_back(lam);
  VectorXd c = VectorXd::Zero(g + 4);
  c.head(g + 2) = Poly::from_roots(roots).coeffs();
  return unit(c);
}

MatrixXd tangent_basis(const BranchConfig& cfg, const MinitwistorLine& line) {
  const int g = cfg.genus;
  std::vector<VectorXd> rows;
  for (const RealPoint& n : line.nodes) {
    SurfacePoint p = SurfacePoint::from_zwy(n.z, n.w, n.y);
    rows.push_back(surface_embed(g, p).real());
  }
  if (line.kind == LineKind::Boundary) rows.pop_back();
  return tangent_from_rows(rows, line.coeffs);
}

// ---------------------------------------------------------------------------

namespace {

struct CircleFrame {
  double r, cw, cy, a, m, d;
  Poly P;
};

CircleFrame frame_of(const BranchConfig& cfg, const MinitwistorLine& line) {
  const int g = cfg.genus;
  CircleFrame f;
  f.cw = line.coeffs[g + 2];
  f.cy = line.coeffs[g + 3];
  f.r = std::hypot(f.cw, f.cy);
  f.P = Poly(line.coeffs.head(g + 2));
  const Poly H = section_polynomial(cfg, line.coeffs);
  f.a = H.coeffs()[H.degree()];
  f.m = 0.5 * (line.arc_lo + line.arc_hi);
  f.d = 0.5 * (line.arc_hi - line.arc_lo);
  return f;
}

// The three linear functionals (alpha d, gamma d, alpha m + beta) of a
// perturbation restricted to the real circle.
Eigen::Vector3d circle_functionals(const BranchConfig& cfg, const MinitwistorLine& line,
                                   const CircleFrame& f, const VectorXd& delta) {
  const int g = cfg.genus;
  const double dy_t = (f.cw * delta[g + 2] + f.cy * delta[g + 3]) / f.r;
  const double dw_t = (-f.cy * delta[g + 2] + f.cw * delta[g + 3]) / f.r;
  Poly A = Poly(delta.head(g + 2)) - f.P * (dy_t / f.r);
  for (const RealPoint& n : line.nodes) A = A.deflate(n.z);
  const double beta = A.coeff(0), alpha = A.coeff(1);
  const double gamma = dw_t * std::sqrt(f.a) / f.r;
  return {alpha * f.d, gamma * f.d, alpha * f.m + beta};
}

}  // namespace

double perturbation_discriminant(const BranchConfig& cfg, const MinitwistorLine& line,
                                 const VectorXd& delta) {
  if (line.kind != LineKind::Regular) throw DegeneratePoint("line is not regular");
  const CircleFrame f = frame_of(cfg, line);
  const Eigen::Vector3d L = circle_functionals(cfg, line, f, delta);
  return L[0] * L[0] + L[1] * L[1] - L[2] * L[2];
}

double ConformalMetric::evaluate(const VectorXd& delta) const {
  const Eigen::Vector3d x = basis.transpose() * delta;
  return x.dot(matrix * x);
}

ConformalMetric conformal_metric(const BranchConfig& cfg, const VectorXd& coeffs) {
  const int g = cfg.genus;
  const VectorXd c = unit(coeffs);
  if (std::hypot(c[g + 2], c[g + 3]) < 1e-6) throw DegeneratePoint("point is on an axis");
  MinitwistorLine line;
  try {
    line = build_line(cfg, c, 4);
  } catch (const NotInFamily& e) {
    throw DegeneratePoint(std::string("line is not regular: ") + e.what());
  }
  if (line.kind != LineKind::Regular) throw DegeneratePoint("line is not regular");
  ConformalMetric M;
  M.coeffs = line.coeffs;
  M.basis = tangent_basis(cfg, line);
  const CircleFrame f = frame_of(cfg, line);
  Eigen::Matrix3d L;
  for (int j = 0; j < 3; ++j) L.col(j) = circle_functionals(cfg, line, f, M.basis.col(j));
  const Eigen::Matrix3d sig = Eigen::Vector3d(1.0, 1.0, -1.0).asDiagonal();
  Eigen::Matrix3d Q = L.transpose() * sig * L;
  // Scale so that the circle-action direction has value 1.
  VectorXd rot = VectorXd::Zero(g + 4);
  rot[g + 2] = M.coeffs[g + 3];
  rot[g + 3] = -M.coeffs[g + 2];
  const Eigen::Vector3d x = M.basis.transpose() * rot;
  const double s = x.dot(Q * x);
  if (!(s > 0.0)) throw DegeneratePoint("circle direction is not spacelike");
  M.matrix = Q / s;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M.matrix);
  M.eigenvalues = es.eigenvalues();
  const double tol = 1e-10 * M.eigenvalues.cwiseAbs().maxCoeff();
  for (int i = 0; i < 3; ++i) {
    if (M.eigenvalues[i] < -tol) ++M.negative;
    if (M.eigenvalues[i] > tol) ++M.positive;
  }
  return M;
}

// ---------------------------------------------------------------------------

namespace {

class Tracer {
 public:
  Tracer(const SeifertFamily& fam, double z, double w) : fam_(fam) {
    const BranchConfig& cfg = fam.jacobian().config();
    const int g = cfg.genus;
    VectorXd m(g + 3);
    double zp = 1.0;
    for (int j = 0; j <= g + 1; ++j) {
      m[j] = zp;
      zp *= z;
    }
    m[g + 2] = w;
    mvec_ = unit(m);
  }

  // Aligned incidence value of the Seifert hyperplane at (phi_xi, v).
  double eval(double phi_xi, double v, GeodesicSample* out) const {
    SeifertPoint sp = fam_.at(2.0 * phi_xi + v, v, guess_);
    VectorXd c = fam_.hyperplane(sp).coeffs;
    if (c.dot(ref_) < 0.0) c = -c;
    if (out) {
      out->u = 2.0 * phi_xi + v;
      out->v = v;
      out->coeffs = c;
      out->tangency = sp.tangency;
    }
    return c.dot(mvec_);
  }

  void accept(const GeodesicSample& s) {
    ref_ = s.coeffs;
    guess_ = s.tangency;
  }

  // Root in v near the prediction.
  GeodesicSample solve(double phi_xi, double v_pred) const {
    auto f = [&](double v) { return eval(phi_xi, v, nullptr); };
    const double lo_lim = 1e-9, hi_lim = kTwoPi - 1e-9;
    v_pred = std::clamp(v_pred, lo_lim, hi_lim);
    const double f0 = f(v_pred);
    double a = v_pred, b = v_pred, fa = f0, fb = f0;
    bool found = f0 == 0.0;
    for (double d = 1e-3; !found && d < 2.0; d *= 2.0) {
      const double lo = std::max(lo_lim, v_pred - d), hi = std::min(hi_lim, v_pred + d);
      const double flo = f(lo), fhi = f(hi);
      if ((flo > 0) != (f0 > 0)) {
        a = lo, fa = flo, b = v_pred, fb = f0, found = true;
      } else if ((fhi > 0) != (f0 > 0)) {
        a = v_pred, fa = f0, b = hi, fb = fhi, found = true;
      }
    }
    if (!found) throw NoConvergence("no incidence root near the predicted point");
    double root = v_pred;
    if (f0 != 0.0) {
      boost::uintmax_t iters = 80;
      auto tol = boost::math::tools::eps_tolerance<double>(50);
      auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb, tol, iters);
      root = 0.5 * (r.first + r.second);
    }
    GeodesicSample s;
    // A sign flip of the aligned coefficients also brackets; reject it.
    if (!(std::abs(eval(phi_xi, root, &s)) < 1e-10)) throw NoConvergence("bracket did not hold a root");
    return s;
  }

  void set_reference(const GeodesicSample& s) { accept(s); }

 private:
  const SeifertFamily& fam_;
  VectorXd mvec_;
  VectorXd ref_;
  VectorXd guess_;
};

}  // namespace

VectorXd Geodesic::coeffs(size_t i) const {
  VectorXd c(samples[i].coeffs.size() + 1);
  c.head(samples[i].coeffs.size()) = samples[i].coeffs;
  c[samples[i].coeffs.size()] = 0.0;
  return s1_act(theta, c);
}

Geodesic geodesic_through_disk_point(const SeifertFamily& fam, double z, double w, int steps) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int g = cfg.genus;
  const double f = cfg.f(z);
  if (cfg.interval_of(z) != g + 1 || !(w * w < -f) || z <= cfg.lambda(g + 1) ||
      z >= cfg.lambda_prime(g + 1))
    throw DegenerateAnchor("anchor is not inside the disk over the last interval");
  const double y = std::sqrt(-f - w * w);
  if (y < 1e-6 * std::sqrt(-f)) throw DegenerateAnchor("anchor lies on the boundary of the disk");

  Geodesic geo;
  geo.x = SurfacePoint::from_zwy(z, w, y);
  geo.y = SurfacePoint::from_zwy(z, w, -y);
  geo.anchor_z = z;
  geo.anchor_w = w;
  const RealCircle& last = fam.jacobian().circle(g + 1);
  const double phi_d = std::acos(std::clamp((last.center() - z) / last.half_width(), -1.0, 1.0));

  Tracer tr(fam, z, w);
  GeodesicSample s0;
  {
    SeifertPoint sp = fam.at(0.0, 2.0 * phi_d);
    s0.u = 0.0;
    s0.v = 2.0 * phi_d;
    s0.coeffs = fam.hyperplane(sp).coeffs;
    s0.tangency = sp.tangency;
  }
  tr.set_reference(s0);
  geo.samples.push_back(s0);

  std::vector<double> phis;  // phi_xi of each sample
  phis.push_back(-phi_d);

  std::function<void(double, double, int)> advance = [&](double from, double to, int depth) {
    const GeodesicSample& prev = geo.samples.back();
    double slope = 0.0;
    if (geo.samples.size() >= 2) {
      const GeodesicSample& pp = geo.samples[geo.samples.size() - 2];
      const double dphi = phis.back() - phis[phis.size() - 2];
      if (dphi != 0.0) slope = (prev.v - pp.v) / dphi;
    }
    try {
      GeodesicSample s = tr.solve(to, prev.v + slope * (to - from));
      // Reject jumps that would skip along the curve.
      if (std::abs(s.v - prev.v) > 0.5 + 4.0 * std::abs(slope * (to - from)))
        throw NoConvergence("incidence root jumped");
      tr.accept(s);
      geo.samples.push_back(s);
      phis.push_back(to);
    } catch (const NumericalError&) {
      if (depth >= 10) throw;
      const double mid = 0.5 * (from + to);
      advance(from, mid, depth + 1);
      advance(mid, to, depth + 1);
    }
  };

  // The crossing of the second axis (phi_xi = phi_d) is a grid node.
  const int n1 = std::max(8, static_cast<int>(std::lround(steps * phi_d / kPi)));
  const int n2 = std::max(8, steps - n1);
  for (int j = 1; j <= n1; ++j) advance(-phi_d + 2.0 * phi_d * (j - 1) / n1, -phi_d + 2.0 * phi_d * j / n1, 0);
  {
    GeodesicSample& s = geo.samples.back();
    const double v_exact = kTwoPi - 2.0 * phi_d;
    if (std::abs(s.v - v_exact) < 1e-8) {
      GeodesicSample e;
      tr.eval(phi_d, v_exact, &e);
      s = e;
      tr.accept(e);
    }
  }
  for (int j = 1; j <= n2; ++j)
    advance(phi_d + (kTwoPi - 2.0 * phi_d) * (j - 1) / n2, phi_d + (kTwoPi - 2.0 * phi_d) * j / n2, 0);

  const auto& S = geo.samples;
  const size_t n = S.size();
  geo.closure_gap = std::min((S.back().coeffs - S.front().coeffs).norm(),
                             (S.back().coeffs + S.front().coeffs).norm());

  // Axis crossings of the lifted u coordinate.
  auto count_crossings = [&](double level, bool interior_only) {
    int c = 0;
    double last_sign = 0.0;
    for (size_t i = 0; i < n; ++i) {
      if (interior_only && (i == 0 || i + 1 == n)) continue;
      const double d = S[i].u - level;
      const double sg = std::abs(d) < 1e-10 ? 0.0 : (d > 0 ? 1.0 : -1.0);
      if (sg == 0.0) continue;
      if (last_sign != 0.0 && sg != last_sign) ++c;
      last_sign = sg;
    }
    return c;
  };
  geo.axis_prime_crossings = count_crossings(kTwoPi, false);
  geo.axis_crossings = 1 + count_crossings(0.0, true) + count_crossings(2.0 * kTwoPi, true);

  // Simplicity in the annulus (u periodic with period 4 pi); the closing
  // segment joins the last sample to the first.
  std::vector<Seg> segs;
  for (size_t i = 0; i + 1 < n; ++i) segs.push_back({S[i].u, S[i].v, S[i + 1].u, S[i + 1].v});
  geo.simple = true;
  geo.min_separation = INFINITY;
  std::vector<double> arclen(n, 0.0);
  for (size_t i = 1; i < n; ++i)
    arclen[i] = arclen[i - 1] + std::hypot(S[i].u - S[i - 1].u, S[i].v - S[i - 1].v);
  const double total = arclen.back();
  for (size_t i = 0; i < segs.size(); ++i) {
    for (size_t j = i + 2; j < segs.size(); ++j) {
      if (i == 0 && j + 1 == segs.size()) continue;
      Seg b = segs[j];
      const double shift = segs[i].x0 - b.x0 - wrap_4pi(segs[i].x0 - b.x0);
      b.x0 += shift;
      b.x1 += shift;
      if (segments_cross(segs[i], b)) geo.simple = false;
      // Separation between parts of the curve far apart along it.
      double along = std::abs(arclen[j] - arclen[i]);
      along = std::min(along, total - along);
      if (along > 0.1 * total) geo.min_separation = std::min(geo.min_separation, segment_distance(segs[i], b));
    }
  }

  // Transversality and incidence at every sample.
  geo.transversality = INFINITY;
  const VectorXd mx = unit(surface_embed(g, geo.x).real());
  const VectorXd my = unit(surface_embed(g, geo.y).real());
  for (size_t i = 0; i < n; ++i) {
    std::vector<VectorXd> rows;
    for (int k = 0; k < g; ++k) rows.push_back(big_row(fam.jacobian().circle(k + 1).embed(S[i].tangency[k]), 0.0));
    const VectorXd c = big_row(S[i].coeffs, 0.0);
    const MatrixXd B = tangent_from_rows(rows, c);
    MatrixXd E(2, 3);
    E.row(0) = mx.transpose() * B;
    E.row(1) = my.transpose() * B;
    Eigen::JacobiSVD<MatrixXd> svd(E);
    geo.transversality = std::min(geo.transversality, svd.singularValues()[1]);
    geo.max_incidence = std::max({geo.max_incidence, std::abs(c.dot(mx)), std::abs(c.dot(my))});
  }
  return geo;
}

Geodesic geodesic_spacelike(const SeifertFamily& fam, const SurfacePoint& x, const SurfacePoint& y,
                            int steps) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int last = cfg.intervals();
  if (real_sphere_of(cfg, x) != last || real_sphere_of(cfg, y) != last)
    throw DegenerateAnchor("anchors must be real points of the last sphere");
  if (std::abs(x.z - y.z) > 1e-12 * (1.0 + std::abs(x.z)))
    throw DegenerateAnchor("anchors must lie over a common point of the last interval");
  const double scale = std::sqrt(std::max(0.0, -cfg.f(x.z.real())));
  if (std::abs(x.u - y.u) <= 1e-12 * (1.0 + scale)) throw DegenerateAnchor("anchors coincide");
  // Rotate so that the anchors differ only in the sign of y.
  cplx ratio = -std::conj(x.u) / y.u;
  double theta = -0.5 * std::arg(ratio);
  const SurfacePoint xr = s1_act(-theta, x);
  Geodesic geo = geodesic_through_disk_point(fam, xr.z.real(), xr.w().real(), steps);
  geo.theta = theta;
  geo.x = x;
  geo.y = y;
  return geo;
}

ZollReport zoll_suite(const SeifertFamily& fam, int trials, unsigned long long seed, int steps) {
  const BranchConfig& cfg = fam.jacobian().config();
  std::mt19937_64 rng(seed);
  ZollReport rep;
  for (int t = 0; t < trials; ++t) {
    const double X = -0.9 + 1.8 * uniform01(rng);
    const double Y = (-0.9 + 1.8 * uniform01(rng)) * std::sqrt(1.0 - X * X);
    double z, w;
    from_disk(cfg, DiskPoint{X, Y}, z, w);
    ++rep.trials;
    Geodesic geo = geodesic_through_disk_point(fam, z, w, steps);
    if (geo.closure_gap < 1e-6) ++rep.closed;
    if (geo.simple) ++rep.simple;
    if (geo.axis_crossings == 1 && geo.axis_prime_crossings == 1) ++rep.axis_ok;
    rep.worst_gap = std::max(rep.worst_gap, geo.closure_gap);
    rep.worst_transversality = std::min(rep.worst_transversality, geo.transversality);
    rep.geodesics.push_back(std::move(geo));
  }
  return rep;
}

// ---------------------------------------------------------------------------

DiskPoint to_disk(const BranchConfig& cfg, double z, double w) {
  const int n = cfg.intervals();
  const double a = cfg.lambda(n), b = cfg.lambda_prime(n);
  const double X = (2.0 * z - a - b) / (b - a);
  const double f = cfg.f(z);
  const double Y = f < 0.0 ? w / std::sqrt(-f) * std::sqrt(std::max(0.0, 1.0 - X * X)) : 0.0;
  return {X, Y};
}

void from_disk(const BranchConfig& cfg, const DiskPoint& p, double& z, double& w) {
  const int n = cfg.intervals();
  const double a = cfg.lambda(n), b = cfg.lambda_prime(n);
  z = 0.5 * ((b - a) * p.X + a + b);
  const double f = cfg.f(z);
  w = p.Y * std::sqrt(std::max(0.0, -f)) / std::sqrt(1.0 - p.X * p.X);
}

FoliationReport foliation_check(const SeifertFamily& fam, double xi_angle, int grid, int arcs) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int g = cfg.genus;
  const RealCircle& last = fam.jacobian().circle(g + 1);
  FoliationReport rep;
  rep.xi_angle = xi_angle;
  rep.arcs = arcs;
  const DiskPoint xi = to_disk(cfg, last.z(xi_angle), last.w(xi_angle));

  // Hyperplanes of one lap: eta runs once around from xi, offset by lap * 2 pi.
  auto lap_planes = [&](int lap) {
    std::vector<VectorXd> planes;
    std::vector<MinitwistorLine> lines;
    VectorXd guess, ref;
    for (int j = 0; j < arcs; ++j) {
      const double s = kPi * (1.0 - std::cos(kPi * (j + 0.5) / arcs));
      const double eta = xi_angle + lap * kTwoPi + s;
      const double u = xi_angle + eta, v = eta - xi_angle;
      SeifertPoint sp = guess.size() ? fam.at(u, v, guess) : fam.at(u, v);
      guess = sp.tangency;
      VectorXd c = fam.hyperplane(sp).coeffs;
      if (ref.size() && c.dot(ref) < 0.0) c = -c;
      ref = c;
      planes.push_back(c);
      if (lap == 0) lines.push_back(build_line(cfg, pullback(fam.hyperplane(sp)), 64));
    }
    return std::make_pair(planes, lines);
  };

  auto coverage = [&](const std::vector<VectorXd>& planes) {
    int inside = 0, once = 0;
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        DiskPoint p{-1.0 + (2.0 * a + 1.0) / grid, -1.0 + (2.0 * b + 1.0) / grid};
        if (p.X * p.X + p.Y * p.Y >= 1.0) continue;
        ++inside;
        double z, w;
        from_disk(cfg, p, z, w);
        VectorXd m(g + 3);
        double zp = 1.0;
        for (int j = 0; j <= g + 1; ++j) {
          m[j] = zp;
          zp *= z;
        }
        m[g + 2] = w;
        int changes = 0;
        double prev = planes[0].dot(m);
        for (size_t j = 1; j < planes.size(); ++j) {
          const double cur = planes[j].dot(m);
          if ((cur > 0) != (prev > 0)) ++changes;
          prev = cur;
        }
        if (changes == 1) ++once;
      }
    }
    rep.grid_points = inside;
    return static_cast<double>(once) / inside;
  };

  auto [first, lines] = lap_planes(0);
  rep.coverage = coverage(first);
  rep.second_lap_coverage = coverage(lap_planes(1).first);

  // Arcs in disk coordinates (the half circle projects onto the arc).
  const double excl = 0.05;
  std::vector<std::vector<Seg>> arc_segs(lines.size());
  std::vector<std::array<double, 4>> boxes(lines.size());
  for (size_t j = 0; j < lines.size(); ++j) {
    // Lines too close to the boundary collapse to a node at xi.
    const auto& C = lines[j].circle;
    std::vector<DiskPoint> pts;
    for (size_t k = 0; !C.empty() && k <= C.size() / 2; ++k) pts.push_back(to_disk(cfg, C[k].z, C[k].w));
    double rmax = 0.0;
    for (const auto& p : pts) rmax = std::max(rmax, std::hypot(p.X - xi.X, p.Y - xi.Y));
    if (j == 0) rep.end_radius_low = rmax;
    if (j + 1 == lines.size()) rep.end_radius_high = rmax;
    std::array<double, 4> box{INFINITY, -INFINITY, INFINITY, -INFINITY};
    for (size_t k = 0; k + 1 < pts.size(); ++k) {
      if (std::hypot(pts[k].X - xi.X, pts[k].Y - xi.Y) < excl ||
          std::hypot(pts[k + 1].X - xi.X, pts[k + 1].Y - xi.Y) < excl)
        continue;
      Seg s{pts[k].X, pts[k].Y, pts[k + 1].X, pts[k + 1].Y};
      arc_segs[j].push_back(s);
      box = {std::min({box[0], s.x0, s.x1}), std::max({box[1], s.x0, s.x1}),
             std::min({box[2], s.y0, s.y1}), std::max({box[3], s.y0, s.y1})};
    }
    boxes[j] = box;
  }
  for (size_t gap = 1; gap < lines.size(); ++gap) {
    for (size_t i = 0; i + gap < lines.size(); ++i) {
      const size_t j = i + gap;
      if (arc_segs[i].empty() || arc_segs[j].empty()) continue;
      const double bx = std::max({0.0, boxes[i][0] - boxes[j][1], boxes[j][0] - boxes[i][1]});
      const double by = std::max({0.0, boxes[i][2] - boxes[j][3], boxes[j][2] - boxes[i][3]});
      if (std::hypot(bx, by) >= rep.min_distance) continue;
      for (const Seg& a : arc_segs[i])
        for (const Seg& b : arc_segs[j]) rep.min_distance = std::min(rep.min_distance, segment_distance(a, b));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------

Eigen::Matrix2d restricted_form(const BranchConfig& cfg, const VectorXd& coeffs, const SurfacePoint& q) {
  const ConformalMetric M = conformal_metric(cfg, coeffs);
  const VectorXd mq = unit(surface_embed(cfg.genus, q).real());
  MatrixXd row = mq.transpose() * M.basis;
  const MatrixXd N = null_columns(row, 2);
  return N.transpose() * M.matrix * N;
}

NullSurface null_surface(const SeifertFamily& fam, const SurfacePoint& q, int thetas, int steps) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int g = cfg.genus;
  if (real_sphere_of(cfg, q) != g + 1) throw DegenerateAnchor("point is not on the last real sphere");
  NullSurface ns;
  const VectorXd mq = unit(surface_embed(g, q).real());
  for (int j = 0; j < thetas; ++j) {
    const double theta = kTwoPi * (j + 0.25) / thetas;
    const SurfacePoint qr = s1_act(-theta, q);
    if (std::abs(qr.y().real()) < 0.05 * std::abs(qr.u)) continue;
    Geodesic geo = geodesic_through_disk_point(fam, qr.z.real(), qr.w().real(), steps);
    geo.theta = theta;
    for (size_t i = 0; i < geo.samples.size(); ++i) {
      const VectorXd c = geo.coeffs(i);
      ns.max_incidence = std::max(ns.max_incidence, std::abs(c.dot(mq)));
      if (i % 8 != 4) continue;
      if (std::hypot(c[g + 2], c[g + 3]) < 1e-2) continue;
      try {
        const Eigen::Matrix2d R = restricted_form(cfg, c, q);
        const double nrm = R.norm();
        ns.max_degeneracy = std::max(ns.max_degeneracy, std::abs(R.determinant()) / (nrm * nrm));
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(R);
        ns.min_restricted = std::min(ns.min_restricted, es.eigenvalues()[0] / nrm);
      } catch (const DegeneratePoint&) {
      }
    }
    ns.thetas.push_back(theta);
    ns.slices.push_back(std::move(geo));
  }
  return ns;
}

SurfacePoint line_point(const BranchConfig& cfg, const MinitwistorLine& line, cplx psi) {
  if (line.kind != LineKind::Regular) throw DegeneratePoint("line is not regular");
  const CircleFrame f = frame_of(cfg, line);
  const cplx z = f.m + f.d * std::cos(psi);
  cplx prod = 1.0;
  for (const RealPoint& n : line.nodes) prod *= (z - n.z);
  const cplx yt = -f.P(z) / f.r;
  const cplx wt = std::sqrt(f.a) / f.r * prod * f.d * std::sin(psi);
  return SurfacePoint::from_zwy(z, (f.cw * yt - f.cy * wt) / f.r, (f.cy * yt + f.cw * wt) / f.r);
}

TimelikeTrace timelike_geodesic(const SeifertFamily& fam, const EWPoint& start, const SurfacePoint& q,
                                int steps, double step) {
  const BranchConfig& cfg = fam.jacobian().config();
  const int g = cfg.genus;
  const VectorXcd mq = surface_embed(g, q);
  VectorXd ref = ew_chart(fam, start);
  auto chart = [&](const Eigen::Vector3d& x) {
    VectorXd c = ew_chart(fam, EWPoint{start.k, x[0], x[1], x[2]});
    if (c.dot(ref) < 0.0) c = -c;
    return c;
  };
  auto F = [&](const Eigen::Vector3d& x) {
    const cplx s = chart(x).cast<cplx>().dot(mq);
    return Eigen::Vector2d(s.real(), s.imag());
  };
  auto jac = [&](const Eigen::Vector3d& x) {
    Eigen::Matrix<double, 2, 3> J;
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e[k] = h;
      J.col(k) = (F(x + e) - F(x - e)) / (2.0 * h);
    }
    return J;
  };
  TimelikeTrace tr;
  Eigen::Vector3d x(start.u, start.v, start.theta);
  Eigen::Vector3d prev_t = Eigen::Vector3d::Zero();
  for (int s = 0; s <= steps; ++s) {
    const auto J = jac(x);
    Eigen::Vector3d t = Eigen::Vector3d(J.row(0).transpose()).cross(Eigen::Vector3d(J.row(1).transpose()));
    t.normalize();
    if (s > 0 && t.dot(prev_t) < 0.0) t = -t;
    prev_t = t;
    const VectorXd c = chart(x);
    const double h = 1e-5;
    VectorXd dc = (chart(x + h * t) - chart(x - h * t)) / (2.0 * h);
    dc -= c * c.dot(dc);
    try {
      const ConformalMetric M = conformal_metric(cfg, c);
      tr.form_values.push_back(M.evaluate(dc) / dc.squaredNorm());
    } catch (const DegeneratePoint&) {
      tr.form_values.push_back(NAN);
    }
    tr.points.push_back(EWPoint{start.k, x[0], x[1], x[2]});
    ref = c;
    if (s == steps) break;
    // Predictor along the tangent, corrector by minimum-norm Newton steps.
    Eigen::Vector3d y = x + step * t;
    for (int it = 0; it < 8; ++it) {
      const Eigen::Vector2d r = F(y);
      if (r.norm() < 1e-13) break;
      const auto Jy = jac(y);
      y -= Jy.transpose() * (Jy * Jy.transpose()).ldlt().solve(r);
    }
    x = y;
  }
  return tr;
}

}  // namespace mtw
