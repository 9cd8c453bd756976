#pragma once

#include <array>
#include <string>
#include <vector>

#include "mtw/seifert.hpp"

namespace mtw {

// Point of the surface u v = -f(z), equivalently w^2 + y^2 = -f(z) with
// u = y + i w, v = y - i w. The two singular points over z = infinity are
// reached along the lines {z = branch point, v = 0} (u -> infinity) and
// {z = branch point, u = 0} (v -> infinity).
struct SurfacePoint {
  enum class Chart { Affine, Infinity, ConjugateInfinity };
  cplx z = 0.0, u = 0.0, v = 0.0;
  Chart chart = Chart::Affine;

  static SurfacePoint from_zwy(cplx z, cplx w, cplx y);
  cplx w() const { return (u - v) / cplx(0.0, 2.0); }
  cplx y() const { return 0.5 * (u + v); }
};

double surface_residual(const BranchConfig& cfg, const SurfacePoint& p);
// (z, u, v) -> (conj z, conj v, conj u).
SurfacePoint real_structure(const SurfacePoint& p);
bool is_real(const SurfacePoint& p, double tol = 1e-12);
// Index i of the real sphere over K_i containing a real point, 0 if none.
int real_sphere_of(const BranchConfig& cfg, const SurfacePoint& p, double tol = 1e-9);

// The two preimages of (z, w) under the projection (z, w, y) -> (z, w).
std::array<SurfacePoint, 2> lift_to_surface(const BranchConfig& cfg, cplx z, cplx w);

// Circle action (z, u, v) -> (z, e^{i theta} u, e^{-i theta} v). On hyperplane
// coefficients (c_0, ..., c_{g+1}, c_w, c_y) it rotates (c_w, c_y) so that the
// image of a section is the section of the rotated coefficients.
SurfacePoint s1_act(double theta, const SurfacePoint& p);
VectorXd s1_act(double theta, const VectorXd& coeffs);

// Hyperplane on the big space from one on the curve's space (c_y = 0).
VectorXd pullback(const RealHyperplane& h);
// Values (1, z, ..., z^{g+1}, w, y) of a point.
VectorXcd surface_embed(int genus, const SurfacePoint& p);

struct RealPoint {
  double z, w, y;
};

enum class LineKind { Regular, Irregular, Boundary };
std::string to_string(LineKind k);

struct MinitwistorLine {
  VectorXd coeffs;
  LineKind kind = LineKind::Regular;
  std::vector<RealPoint> nodes;  // ordered by z
  // Regular kind: real circle over [arc_lo, arc_hi] inside the last interval.
  std::vector<RealPoint> circle;
  double arc_lo = 0.0, arc_hi = 0.0;
  // Smallest second derivative of the restricted polynomial over the nodes,
  // relative to its size; positive for certified nodes.
  double node_margin = 0.0;
  // Irregular kind: feet of the line pairs over the chosen branch points,
  // and the position of the conic.
  std::vector<double> line_feet;
  double conic_z = 0.0;
};

// Restricted polynomial H = P^2 + (c_w^2 + c_y^2) f whose negative set carries
// the real points of a real hyperplane section.
Poly section_polynomial(const BranchConfig& cfg, const VectorXd& coeffs);

// Throws NotInFamily if the section is not a real minitwistor line.
MinitwistorLine build_line(const BranchConfig& cfg, const VectorXd& coeffs, int circle_samples = 128);

// Point of CP^1 in homogeneous coordinates [a : b].
struct CP1 {
  cplx a = 0.0, b = 1.0;
  bool is_zero(double tol = 1e-12) const;
  bool is_infinity(double tol = 1e-12) const;
  cplx value() const { return a / b; }
};

struct QuadricImage {
  CP1 first, second;
};

// The degree-(g+1) map given by the two pencils attached to boundary data k.
// The hatted variant replaces lambda_{g+1} by lambda'_{g+1}.
class QuadricCover {
 public:
  QuadricCover(const BranchConfig& cfg, const BoundaryData& data, bool hatted);

  const BoundaryData& data() const { return data_; }
  bool hatted() const { return hatted_; }
  // Branch points in the designated set and its complement.
  const std::vector<double>& designated() const { return a_; }
  const std::vector<double>& complement() const { return b_; }

  QuadricImage project(const SurfacePoint& p) const;
  // All preimages of a finite target point (q1, q2).
  std::vector<SurfacePoint> fiber(cplx q1, cplx q2) const;
  // Reducible section over the real target point (q1, 1 / conj q1).
  VectorXd boundary_coeffs(cplx q1) const;
  MinitwistorLine boundary_section(cplx q1) const;

 private:
  cplx prod_a(cplx z) const;
  cplx prod_b(cplx z) const;

  BranchConfig cfg_;
  BoundaryData data_;
  bool hatted_;
  std::vector<double> a_, b_;
};

// Target real structure (q1, q2) -> (1 / conj q2, 1 / conj q1).
QuadricImage target_real_structure(const QuadricImage& q);

}  // namespace mtw
