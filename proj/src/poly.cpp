#include "mtw/poly.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/Polynomials>

namespace mtw {

Poly Poly::from_roots(const std::vector<double>& roots, double lead) {
  Eigen::VectorXd c = Eigen::VectorXd::Constant(1, lead);
  for (double r : roots) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(c.size() + 1);
    n.tail(c.size()) += c;
    n.head(c.size()) -= r * c;
    c = n;
  }
  return Poly(c);
}

int Poly::degree() const {
  double scale = c_.size() ? c_.cwiseAbs().maxCoeff() : 0.0;
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i)
    if (std::abs(c_[i]) > 1e-14 * scale) return i;
  return 0;
}

double Poly::operator()(double x) const {
  double s = 0.0;
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) s = s * x + c_[i];
  return s;
}

cplx Poly::operator()(cplx x) const {
  cplx s = 0.0;
  for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) s = s * x + c_[i];
  return s;
}

Poly Poly::derivative() const {
  if (c_.size() <= 1) return Poly(Eigen::VectorXd::Zero(1));
  Eigen::VectorXd d(c_.size() - 1);
  for (int i = 1; i < c_.size(); ++i) d[i - 1] = i * c_[i];
  return Poly(d);
}

Poly Poly::operator*(const Poly& o) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(c_.size() + o.c_.size() - 1);
  for (int i = 0; i < c_.size(); ++i)
    for (int j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Poly(r);
}

Poly Poly::operator+(const Poly& o) const {
  Eigen::VectorXd r = Eigen::VectorXd::Zero(std::max(c_.size(), o.c_.size()));
  r.head(c_.size()) += c_;
  r.head(o.c_.size()) += o.c_;
  return Poly(r);
}

Poly Poly::operator-(const Poly& o) const { return *this + o * -1.0; }

Poly Poly::operator*(double s) const { return Poly(c_ * s); }

std::vector<cplx> Poly::roots() const {
  int n = degree();
  std::vector<cplx> out;
  if (n < 1) return out;
  if (n == 1) {
    out.emplace_back(-c_[0] / c_[1]);
    return out;
  }
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(c_.head(n + 1));
  const auto& r = solver.roots();
  for (int i = 0; i < r.size(); ++i) out.push_back(r[i]);
  // Polish each root with a few Newton steps on the original polynomial.
  Poly d = derivative();
  for (auto& z : out) {
    for (int it = 0; it < 3; ++it) {
      cplx dz = (*this)(z) / d(z);
      if (!std::isfinite(std::abs(dz))) break;
      if (std::abs((*this)(z - dz)) >= std::abs((*this)(z))) break;
      z -= dz;
    }
  }
  return out;
}

Poly Poly::deflate(double r) const {
  int n = degree();
  if (n < 1) return Poly(Eigen::VectorXd::Zero(1));
  Eigen::VectorXd q(n);
  double carry = c_[n];
  for (int i = n - 1; i >= 0; --i) {
    q[i] = carry;
    carry = c_[i] + carry * r;
  }
  return Poly(q);
}

}  // namespace mtw
