#pragma once

#include <vector>

#include "mtw/jacobian.hpp"

namespace mtw {

// Choice of ramification points (rho_1, ..., rho_g) with rho_1 = r_1. The
// index k runs over 1..2^{g-1}; bit i-2 of k-1 selects r'_i for i >= 2.
struct BoundaryData {
  int k = 1;
  std::vector<Ramification> rho;  // size g

  int genus() const { return static_cast<int>(rho.size()); }
  // The complementary tuple (every r_i swapped with r'_i).
  std::vector<Ramification> complement() const;
};

BoundaryData boundary_data(int genus, int k);
std::vector<BoundaryData> all_boundary_data(int genus);
// Index of an arbitrary choice tuple; a tuple and its complement share k.
int boundary_index(const std::vector<Ramification>& choices);

enum class SeifertKind { Interior, Boundary, Singular };

// Point of the Seifert surface in annulus coordinates
//   u = phi_xi + phi_eta in [0, 4 pi),  v = phi_eta - phi_xi in [0, 2 pi],
// where phi are angles on the last real circle. u in [0, 2 pi) is branch 0,
// u in [2 pi, 4 pi) is branch 1; u = 0 and u = 2 pi are the singular lines
// (eta the conjugate of xi), v = 0 and v = 2 pi the two boundary circles.
struct SeifertPoint {
  BoundaryData data;
  double u = 0.0, v = 0.0;
  VectorXd tangency;  // angles of p_1..p_g on their real circles
  double xi_angle = 0.0, eta_angle = 0.0;
  int branch = 0;
  SeifertKind kind = SeifertKind::Interior;
};

// Real hyperplane c . (1, z, ..., z^{g+1}, w) = 0, unit norm with the z^{g+1}
// coefficient made non-negative.
struct RealHyperplane {
  VectorXd coeffs;
  double residual = 0.0;   // smallest / largest singular value
  double gap_ratio = 0.0;  // second smallest / smallest singular value
};

// Wrap (u, v) into the fundamental annulus and sort the kind.
void normalize_annulus(double& u, double& v);

// Newton iteration on the product of the first g real circles solving
// sum a(p_i) = target. The target must lie in the component of sum a(r_i).
VectorXd invert_real_torus(const Jacobian& jac, const JacPoint& target, VectorXd guess);

// Least-squares hyperplane through the divisor 2 sum p_i + xi + eta, points
// given by angles on their real circles. Throws DegenerateNullspace when the
// nullspace is not one-dimensional.
RealHyperplane fit_hyperplane(const Jacobian& jac, const VectorXd& tangency, double xi_angle,
                              double eta_angle);

class SeifertFamily {
 public:
  SeifertFamily(const Jacobian& jac, const BoundaryData& data);

  const Jacobian& jacobian() const { return *jac_; }
  const BoundaryData& data() const { return data_; }

  // Solve at annulus coordinates; continuation along u from the singular line
  // unless a guess for the tangency angles is supplied.
  SeifertPoint at(double u, double v) const;
  SeifertPoint at(double u, double v, const VectorXd& guess) const;
  // Unordered pair (xi, eta) on the last real circle plus branch tag.
  SeifertPoint from_points(const CurvePoint& xi, const CurvePoint& eta, int branch) const;

  RealHyperplane hyperplane(const SeifertPoint& sp) const;

  // Abel residual |2 sum a(p_i) + a(xi) + a(eta)| on the torus.
  double abel_residual(const SeifertPoint& sp) const;

  // Points sum a(rho_i) and sum a(rho'_i).
  JacPoint singular_point(bool primed) const;
  // Closed curve of sums sum a(p_i) along the boundary circle whose point at
  // u = 0 has xi = r_{g+1} (last_prime false) or r'_{g+1} (true).
  std::vector<JacPoint> boundary_circle(bool last_prime, int samples) const;

 private:
  VectorXd target(double phi_xi, double phi_eta) const;
  VectorXd solve(const VectorXd& target, VectorXd guess) const;

  const Jacobian* jac_;
  BoundaryData data_;
  VectorXd rho_shift_;  // sum of half real periods over primed choices
  VectorXd rho_angles_;
};

struct SeifertSurface {
  BoundaryData data;
  JacPoint singular, singular_prime;
  std::vector<SeifertPoint> samples;
  std::vector<RealHyperplane> hyperplanes;
  int attempted = 0;
  int failures = 0;
};

// All 2^{g-1} surfaces, each sampled on a grid x grid mesh of the annulus
// (both branches). grid = 0 skips sampling.
std::vector<SeifertSurface> enumerate_seifert(const Jacobian& jac, int grid);

}  // namespace mtw
