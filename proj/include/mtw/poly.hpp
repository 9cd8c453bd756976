#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace mtw {

using cplx = std::complex<double>;

// Dense univariate polynomial, coefficients in ascending degree.
class Poly {
 public:
  Poly() = default;
  explicit Poly(Eigen::VectorXd c) : c_(std::move(c)) {}
  static Poly from_roots(const std::vector<double>& roots, double lead = 1.0);

  int degree() const;
  const Eigen::VectorXd& coeffs() const { return c_; }
  double coeff(int i) const { return i < c_.size() ? c_[i] : 0.0; }

  double operator()(double x) const;
  cplx operator()(cplx x) const;
  Poly derivative() const;

  Poly operator*(const Poly& o) const;
  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator*(double s) const;

  // All complex roots (companion-matrix eigenvalues). Trailing
  // near-zero leading coefficients are trimmed first.
  std::vector<cplx> roots() const;

  // Synthetic division by (x - r); the remainder is dropped.
  Poly deflate(double r) const;

 private:
  Eigen::VectorXd c_;
};

}  // namespace mtw
