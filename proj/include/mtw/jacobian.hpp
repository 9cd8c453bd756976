#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mtw/curve.hpp"

namespace mtw {

// Lattice generated by the real periods (circles over K_1..K_g) and the
// imaginary periods (gap cycles 1..g). The two blocks are stored separately
// because the lattice splits as real_block Z^g + i imag_block Z^g.
struct PeriodLattice {
  MatrixXcd columns;    // g x 2g
  MatrixXd real_block;  // columns 1..g
  MatrixXd imag_block;  // imaginary parts of columns g+1..2g
  MatrixXd real_inverse;
  MatrixXd imag_inverse;
  // Largest discarded relative part when enforcing the reality split.
  double discarded_real = 0.0;
  double discarded_imag = 0.0;
  double imag_condition = 0.0;
  bool ill_conditioned = false;

  int genus() const { return static_cast<int>(real_block.rows()); }
};

PeriodLattice period_lattice(const BranchConfig& cfg);
PeriodLattice lattice_from_blocks(const MatrixXd& real_block, const MatrixXd& imag_block);

// Point of C^g / lattice in fractional coordinates, each in [0, 1).
struct JacPoint {
  VectorXd re;
  VectorXd im;
};

JacPoint jac_origin(int g);
JacPoint reduce(const PeriodLattice& lat, const VectorXcd& v);
JacPoint reduce_fractional(VectorXd re, VectorXd im);
VectorXcd representative(const PeriodLattice& lat, const JacPoint& x);
JacPoint operator+(const JacPoint& a, const JacPoint& b);
JacPoint operator-(const JacPoint& a, const JacPoint& b);
JacPoint operator-(const JacPoint& a);
JacPoint scale(const JacPoint& a, int n);
// Largest wrap-around distance over all fractional coordinates.
double torus_distance(const JacPoint& a, const JacPoint& b);
constexpr double kLatticeEps = 1e-7;
bool jac_equal(const JacPoint& a, const JacPoint& b, double eps = kLatticeEps);

JacPoint doubling(const JacPoint& x);

// Element of (Z/2)^g. As a real-component label it selects the torus
// Re + (1/2) sum delta_i Pi_{g+i}; as a point of the identity component
// it is (1/2) sum delta_i Pi_i.
struct TorsionElement {
  std::vector<int> bits;
};

JacPoint component_offset(const TorsionElement& t);
JacPoint identity_torsion(const TorsionElement& t);
std::vector<TorsionElement> all_torsion(int g);
// True if the imaginary fractional part is a half-integer vector.
bool is_real_point(const JacPoint& x, double eps = kLatticeEps);
// Real component label of a real point.
TorsionElement real_component(const JacPoint& x);

struct Ramification {
  int index;   // 1..g+1
  bool prime;  // false: lambda_i, true: lambda'_i
  std::string label() const;
};

class Jacobian {
 public:
  explicit Jacobian(const BranchConfig& cfg);

  const BranchConfig& config() const { return cfg_; }
  int genus() const { return cfg_.genus; }
  const PeriodLattice& lattice() const { return lat_; }
  const RealCircle& circle(int i) const { return circles_[i - 1]; }

  // Integral from lambda_1 to the branch point along the upper rim of the
  // real axis on sheet +; closed form in terms of half periods.
  VectorXcd branch_value(const Ramification& r) const;
  JacPoint half_period(const Ramification& r) const;
  std::vector<std::pair<Ramification, JacPoint>> half_period_table() const;

  // Lift of the Abel map to C^g (before reduction).
  VectorXcd abel_lift(const CurvePoint& p) const;
  JacPoint abel(const CurvePoint& p) const;
  JacPoint abel_divisor(const std::vector<CurvePoint>& pts) const;

  // Abel image of the real-circle point at angle phi on circle i: real part
  // Re a(lambda_i) + increment, imaginary part fixed.
  VectorXcd abel_circle(int i, double phi) const;

  // Condition number of the matrix with columns (1, z_i, ..., z_i^{g-1})/w_i.
  double jacobi_condition(const std::vector<CurvePoint>& pts) const;

 private:
  BranchConfig cfg_;
  std::vector<RealCircle> circles_;
  PeriodLattice lat_;
  std::vector<VectorXcd> gap_half_;  // per gap index
};

}  // namespace mtw
