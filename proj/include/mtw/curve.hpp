#pragma once

#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mtw/poly.hpp"

namespace mtw {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Real branch points lambda_1 < lambda'_1 < ... < lambda_{g+1} < lambda'_{g+1}.
struct BranchConfig {
  int genus = 0;
  std::vector<double> points;

  static BranchConfig from_points(std::vector<double> pts);
  // Text record: genus on the first line, the 2g+2 points on the second.
  static BranchConfig parse(const std::string& text);
  std::string to_text() const;

  // Intervals are numbered 1..g+1.
  double lambda(int i) const { return points[2 * (i - 1)]; }
  double lambda_prime(int i) const { return points[2 * (i - 1) + 1]; }
  int intervals() const { return genus + 1; }

  // f(z) = prod (z - lambda_i)(z - lambda'_i); the curve is w^2 = -f(z).
  double f(double z) const;
  cplx f(cplx z) const;
  Poly f_poly() const;

  // 1-based interval K_i containing x (closed), or 0.
  int interval_of(double x) const;
  // Smallest distance between consecutive branch points.
  double min_gap() const;
};

// G1 = (-2,-1,1,2), G2 = (-5,-4,-2,-1,1,2), G3 = (-7,-6,-4,-3,-1,0,2,3).
BranchConfig canonical_config(int genus);

enum class Sheet { Plus = 1, Minus = -1 };

// Branch-cut convention: cuts along the intervals K_i. On sheet + the value is
//   w(z) = -i * prod_j sqrt(z - lambda_j) sqrt(z - lambda'_j)
// with principal square roots; on a cut the limit from the upper half-plane
// is used. This gives w = (-1)^{g+1-i} sqrt(-f) on K_i.
cplx eval_w(const BranchConfig& cfg, cplx z, Sheet sheet);

struct CurvePoint {
  cplx z;
  cplx w;
  Sheet sheet = Sheet::Plus;
};

CurvePoint curve_point(const BranchConfig& cfg, cplx z, Sheet sheet);
// Point with an explicit w; the sheet tag is recovered from eval_w.
CurvePoint curve_point_with_w(const BranchConfig& cfg, cplx z, cplx w);
// Hyperelliptic involution (z, w) -> (z, -w).
CurvePoint involution(const BranchConfig& cfg, const CurvePoint& p);
bool is_ramification(const BranchConfig& cfg, const CurvePoint& p);
// |w^2 + f(z)| relative to the size of f near z.
double curve_residual(const BranchConfig& cfg, const CurvePoint& p);

// (1, z, ..., z^{g-1}) / w.
VectorXcd holomorphic_basis(const BranchConfig& cfg, const CurvePoint& p);

enum class CycleKind { RealCircle, Gap };

struct CycleSegment {
  double from;
  double to;
  Sheet sheet;
};

// Real circle i covers K_i, gap cycle i covers [lambda'_i, lambda_{i+1}];
// both run with increasing z on sheet + and return on sheet -.
struct CyclePath {
  CycleKind kind;
  int index;
  std::vector<CycleSegment> segments;
};

CyclePath make_cycle(const BranchConfig& cfg, CycleKind kind, int index);

enum class Ambient { CP_g2, CP_g3 };

struct EmbeddedPoint {
  VectorXcd coords;
  Ambient ambient;
};

// (1, z, ..., z^{g+1}, w) or (1, z, ..., z^{g+1}, w, y) with y = 0 on the curve.
EmbeddedPoint embed(const BranchConfig& cfg, const CurvePoint& p, Ambient ambient);

// Angle chart of the real circle over K_i:
//   z = m - h cos(phi),  w = s_i h sin(phi) sqrt(G_i(z)),  s_i = (-1)^{g+1-i},
// so phi in (0, pi) is sheet +, phi = 0 is lambda_i and phi = pi is lambda'_i.
// In this chart dz/w = s_i dphi / sqrt(G_i), which is smooth and periodic,
// and the running integral is evaluated from its cosine series.
class RealCircle {
 public:
  RealCircle(const BranchConfig& cfg, int index);

  int index() const { return index_; }
  double center() const { return m_; }
  double half_width() const { return h_; }
  double sign() const { return s_; }

  double z(double phi) const;
  double w(double phi) const;
  double dz(double phi) const;
  double dw(double phi) const;
  CurvePoint point(double phi) const;
  // Angle of a real point over K_i, in (-pi, pi].
  double angle_of(double z, double w) const;

  // d/dphi of the running integral of the differential basis.
  VectorXd integrand(double phi) const;
  // Integral of the basis from lambda_i to point(phi) along the circle.
  VectorXd increment(double phi) const;
  // Integral over the full circle (the real period).
  VectorXd period() const { return 2.0 * std::numbers::pi * a0_; }

  // Embedded real coordinates (1, z, ..., z^{g+1}, w) and their phi-derivative.
  VectorXd embed(double phi) const;
  VectorXd embed_derivative(double phi) const;

  int series_terms() const { return static_cast<int>(an_.cols()); }

 private:
  double g_factor(double z) const;
  double g_log_derivative(double z) const;

  BranchConfig cfg_;
  int index_;
  double m_, h_, s_;
  VectorXd a0_;
  MatrixXd an_;  // g x N, coefficient of cos(n phi) for n = 1..N
};

// Integral of the basis over a cycle.
VectorXcd integrate_basis(const BranchConfig& cfg, const CyclePath& path);

// Integral of the basis along the straight segment from a to b. The branch of
// w on the segment is the one that matches w_ref at a + t_ref (b - a).
// Endpoints at branch points are handled by a square substitution.
VectorXcd segment_integral(const BranchConfig& cfg, cplx a, cplx b, double t_ref,
                           cplx w_ref);

// Segment integral between two curve points, branch fixed by an endpoint.
VectorXcd integrate_segment(const BranchConfig& cfg, const CurvePoint& from,
                            const CurvePoint& to);

// Gap integral from lambda'_i to lambda_{i+1} on sheet + (pure imaginary).
VectorXcd gap_half_period(const BranchConfig& cfg, int index);

}  // namespace mtw
