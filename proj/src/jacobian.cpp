#include "mtw/jacobian.hpp"

#include <algorithm>
#include <cmath>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

double frac(double x) {
  double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

double wrap_distance(double a, double b) {
  double d = std::abs(a - b);
  d -= std::floor(d);
  return std::min(d, 1.0 - d);
}

}  // namespace

PeriodLattice lattice_from_blocks(const MatrixXd& real_block, const MatrixXd& imag_block) {
  PeriodLattice lat;
  const int g = static_cast<int>(real_block.rows());
  lat.real_block = real_block;
  lat.imag_block = imag_block;
  lat.columns.resize(g, 2 * g);
  lat.columns.leftCols(g) = real_block.cast<cplx>();
  lat.columns.rightCols(g) = imag_block.cast<cplx>() * cplx(0.0, 1.0);
  Eigen::FullPivLU<MatrixXd> lr(real_block), li(imag_block);
  if (!lr.isInvertible() || !li.isInvertible())
    throw NumericalError("DegenerateLattice", "period blocks are singular");
  lat.real_inverse = lr.inverse();
  lat.imag_inverse = li.inverse();
  Eigen::JacobiSVD<MatrixXd> svd(imag_block);
  const auto& s = svd.singularValues();
  lat.imag_condition = s[0] / s[s.size() - 1];
  lat.ill_conditioned = lat.imag_condition > 1e8;
  return lat;
}

PeriodLattice period_lattice(const BranchConfig& cfg) {
  const int g = cfg.genus;
  MatrixXcd raw(g, 2 * g);
  for (int i = 1; i <= g; ++i) {
    raw.col(i - 1) = integrate_basis(cfg, make_cycle(cfg, CycleKind::RealCircle, i));
    raw.col(g + i - 1) = integrate_basis(cfg, make_cycle(cfg, CycleKind::Gap, i));
  }
  double dr = 0.0, di = 0.0;
  for (int i = 0; i < g; ++i) {
    dr = std::max(dr, raw.col(i).imag().norm() / raw.col(i).norm());
    di = std::max(di, raw.col(g + i).real().norm() / raw.col(g + i).norm());
  }
  PeriodLattice lat = lattice_from_blocks(raw.leftCols(g).real(), raw.rightCols(g).imag());
  lat.discarded_real = dr;
  lat.discarded_imag = di;
  return lat;
}

JacPoint jac_origin(int g) { return JacPoint{VectorXd::Zero(g), VectorXd::Zero(g)}; }

JacPoint reduce_fractional(VectorXd re, VectorXd im) {
  for (int i = 0; i < re.size(); ++i) re[i] = frac(re[i]);
  for (int i = 0; i < im.size(); ++i) im[i] = frac(im[i]);
  return JacPoint{std::move(re), std::move(im)};
}

JacPoint reduce(const PeriodLattice& lat, const VectorXcd& v) {
  return reduce_fractional(lat.real_inverse * v.real(), lat.imag_inverse * v.imag());
}

VectorXcd representative(const PeriodLattice& lat, const JacPoint& x) {
  VectorXcd v(x.re.size());
  v.real() = lat.real_block * x.re;
  v.imag() = lat.imag_block * x.im;
  return v;
}

JacPoint operator+(const JacPoint& a, const JacPoint& b) {
  return reduce_fractional(a.re + b.re, a.im + b.im);
}

JacPoint operator-(const JacPoint& a, const JacPoint& b) {
  return reduce_fractional(a.re - b.re, a.im - b.im);
}

JacPoint operator-(const JacPoint& a) { return reduce_fractional(-a.re, -a.im); }

JacPoint scale(const JacPoint& a, int n) {
  return reduce_fractional(a.re * static_cast<double>(n), a.im * static_cast<double>(n));
}

double torus_distance(const JacPoint& a, const JacPoint& b) {
  double d = 0.0;
  for (int i = 0; i < a.re.size(); ++i) {
    d = std::max(d, wrap_distance(a.re[i], b.re[i]));
    d = std::max(d, wrap_distance(a.im[i], b.im[i]));
  }
  return d;
}

bool jac_equal(const JacPoint& a, const JacPoint& b, double eps) {
  return torus_distance(a, b) < eps;
}

JacPoint doubling(const JacPoint& x) { return scale(x, 2); }

JacPoint component_offset(const TorsionElement& t) {
  const int g = static_cast<int>(t.bits.size());
  VectorXd im(g);
  for (int i = 0; i < g; ++i) im[i] = 0.5 * t.bits[i];
  return reduce_fractional(VectorXd::Zero(g), im);
}

JacPoint identity_torsion(const TorsionElement& t) {
  const int g = static_cast<int>(t.bits.size());
  VectorXd re(g);
  for (int i = 0; i < g; ++i) re[i] = 0.5 * t.bits[i];
  return reduce_fractional(re, VectorXd::Zero(g));
}

std::vector<TorsionElement> all_torsion(int g) {
  std::vector<TorsionElement> out;
  for (int mask = 0; mask < (1 << g); ++mask) {
    TorsionElement t;
    for (int i = 0; i < g; ++i) t.bits.push_back((mask >> i) & 1);
    out.push_back(t);
  }
  return out;
}

bool is_real_point(const JacPoint& x, double eps) {
  for (int i = 0; i < x.im.size(); ++i)
    if (std::min(wrap_distance(x.im[i], 0.0), wrap_distance(x.im[i], 0.5)) >= eps) return false;
  return true;
}

TorsionElement real_component(const JacPoint& x) {
  TorsionElement t;
  for (int i = 0; i < x.im.size(); ++i)
    t.bits.push_back(wrap_distance(x.im[i], 0.5) < wrap_distance(x.im[i], 0.0) ? 1 : 0);
  return t;
}

std::string Ramification::label() const {
  return std::string(prime ? "r'" : "r") + std::to_string(index);
}

// ---------------------------------------------------------------------------

Jacobian::Jacobian(const BranchConfig& cfg) : cfg_(cfg) {
  for (int i = 1; i <= cfg.intervals(); ++i) circles_.emplace_back(cfg, i);
  for (int i = 1; i <= cfg.genus; ++i) gap_half_.push_back(gap_half_period(cfg, i));
  const int g = cfg.genus;
  MatrixXd re(g, g), im(g, g);
  for (int i = 0; i < g; ++i) {
    re.col(i) = circles_[i].period();
    im.col(i) = 2.0 * gap_half_[i].imag();
  }
  lat_ = lattice_from_blocks(re, im);
  double di = 0.0;
  for (int i = 0; i < g; ++i) di = std::max(di, gap_half_[i].real().norm() / gap_half_[i].norm());
  lat_.discarded_imag = di;
}

VectorXcd Jacobian::branch_value(const Ramification& r) const {
  const int g = genus();
  VectorXcd v = VectorXcd::Zero(g);
  for (int j = 1; j < r.index; ++j)
    v += 0.5 * circles_[j - 1].period().cast<cplx>() + gap_half_[j - 1];
  if (r.prime) v += 0.5 * circles_[r.index - 1].period().cast<cplx>();
  return v;
}

JacPoint Jacobian::half_period(const Ramification& r) const { return reduce(lat_, branch_value(r)); }

std::vector<std::pair<Ramification, JacPoint>> Jacobian::half_period_table() const {
  std::vector<std::pair<Ramification, JacPoint>> t;
  for (int i = 1; i <= cfg_.intervals(); ++i)
    for (bool p : {false, true}) {
      Ramification r{i, p};
      t.emplace_back(r, half_period(r));
    }
  return t;
}

VectorXcd Jacobian::abel_circle(int i, double phi) const {
  VectorXcd base = branch_value(Ramification{i, false});
  base.real() += circles_[i - 1].increment(phi);
  return base;
}

VectorXcd Jacobian::abel_lift(const CurvePoint& p) const {
  // Points on the real circles use the angle chart.
  if (p.z.imag() == 0.0) {
    const double x = p.z.real();
    const int i = cfg_.interval_of(x);
    if (i > 0 && std::abs(p.w.imag()) <= 1e-12 * (1.0 + std::abs(p.w.real()))) {
      const RealCircle& c = circles_[i - 1];
      return abel_circle(i, c.angle_of(x, p.w.real()));
    }
  }
  // Otherwise integrate from the nearest branch point along a segment.
  int best = 0;
  double bd = INFINITY;
  for (size_t c = 0; c < cfg_.points.size(); ++c) {
    double d = std::abs(p.z - cfg_.points[c]);
    if (d < bd) {
      bd = d;
      best = static_cast<int>(c);
    }
  }
  Ramification r{best / 2 + 1, best % 2 == 1};
  if (bd == 0.0) return branch_value(r);
  CurvePoint b{cfg_.points[best], 0.0, Sheet::Plus};
  return branch_value(r) + integrate_segment(cfg_, b, p);
}

JacPoint Jacobian::abel(const CurvePoint& p) const { return reduce(lat_, abel_lift(p)); }

JacPoint Jacobian::abel_divisor(const std::vector<CurvePoint>& pts) const {
  if (pts.empty()) throw ConfigError("empty divisor");
  VectorXcd acc = VectorXcd::Zero(genus());
  for (const auto& p : pts) acc += abel_lift(p);
  return reduce(lat_, acc);
}

double Jacobian::jacobi_condition(const std::vector<CurvePoint>& pts) const {
  const int g = genus();
  MatrixXcd m(g, static_cast<int>(pts.size()));
  for (size_t k = 0; k < pts.size(); ++k) m.col(k) = holomorphic_basis(cfg_, pts[k]);
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  return s[0] / s[s.size() - 1];
}

}  // namespace mtw
