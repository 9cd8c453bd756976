#include "mtw/seifert.hpp"

#include <cmath>
#include <numbers>

#include "mtw/errors.hpp"

namespace mtw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_half(double x) { return x - std::round(x); }

VectorXd wrap_half(VectorXd x) {
  for (int i = 0; i < x.size(); ++i) x[i] = wrap_half(x[i]);
  return x;
}

VectorXd unit(const VectorXd& v) {
  const double n = v.norm();
  return n > 0.0 ? VectorXd(v / n) : v;
}

// Damped Newton for sum_i F_i(phi_i) = T modulo the real period block, where
// F_i is the running integral on real circle i. Returns the residual norm in
// fractional coordinates.
double newton_torus(const Jacobian& jac, const VectorXd& T, VectorXd& phi) {
  const int g = jac.genus();
  const auto& lat = jac.lattice();
  auto residual = [&](const VectorXd& p) {
    VectorXd s = -T;
    for (int i = 0; i < g; ++i) s += jac.circle(i + 1).increment(p[i]);
    return wrap_half(VectorXd(lat.real_inverse * s));
  };
  VectorXd r = residual(phi);
  double rn = r.norm();
  for (int it = 0; it < 50 && rn >= 1e-14; ++it) {
    MatrixXd J(g, g);
    for (int i = 0; i < g; ++i) J.col(i) = jac.circle(i + 1).integrand(phi[i]);
    VectorXd step = J.partialPivLu().solve(VectorXd(lat.real_block * r));
    double t = 1.0;
    bool ok = false;
    for (int h = 0; h < 12 && !ok; ++h, t *= 0.5) {
      VectorXd cand = phi - t * step;
      VectorXd rc = residual(cand);
      if (rc.norm() < rn) {
        phi = cand;
        r = rc;
        rn = rc.norm();
        ok = true;
      }
    }
    if (!ok) break;
  }
  return rn;
}

}  // namespace

std::vector<Ramification> BoundaryData::complement() const {
  std::vector<Ramification> out = rho;
  for (auto& r : out) r.prime = !r.prime;
  return out;
}

BoundaryData boundary_data(int genus, int k) {
  if (genus < 1) throw ConfigError("genus must be positive");
  if (k < 1 || k > (1 << (genus - 1))) throw ConfigError("boundary index out of range");
  BoundaryData b;
  b.k = k;
  b.rho.push_back(Ramification{1, false});
  for (int i = 2; i <= genus; ++i) b.rho.push_back(Ramification{i, (((k - 1) >> (i - 2)) & 1) != 0});
  return b;
}

std::vector<BoundaryData> all_boundary_data(int genus) {
  std::vector<BoundaryData> out;
  for (int k = 1; k <= (1 << (genus - 1)); ++k) out.push_back(boundary_data(genus, k));
  return out;
}

int boundary_index(const std::vector<Ramification>& choices) {
  if (choices.empty()) throw ConfigError("empty choice tuple");
  const bool flip = choices[0].prime;
  int k = 1;
  for (size_t i = 1; i < choices.size(); ++i)
    if (choices[i].prime != flip) k += 1 << (i - 1);
  return k;
}

void normalize_annulus(double& u, double& v) {
  // (u, v) lives on R^2 / (4 pi Z)^2 modulo v -> -v.
  u = std::fmod(u, 2.0 * kTwoPi);
  if (u < 0.0) u += 2.0 * kTwoPi;
  if (u >= 2.0 * kTwoPi) u = 0.0;
  v = std::remainder(v, 2.0 * kTwoPi);
  v = std::abs(v);
}

// ---------------------------------------------------------------------------

RealHyperplane fit_hyperplane(const Jacobian& jac, const VectorXd& tangency, double xi_angle,
                              double eta_angle) {
  const int g = jac.genus();
  MatrixXd A(2 * g + 2, g + 3);
  for (int i = 0; i < g; ++i) {
    const RealCircle& c = jac.circle(i + 1);
    A.row(2 * i) = unit(c.embed(tangency[i])).transpose();
    A.row(2 * i + 1) = unit(c.embed_derivative(tangency[i])).transpose();
  }
  const RealCircle& last = jac.circle(g + 1);
  VectorXd mx = last.embed(xi_angle);
  A.row(2 * g) = unit(mx).transpose();
  if (std::abs(std::remainder(eta_angle - xi_angle, kTwoPi)) < 1e-9) {
    A.row(2 * g + 1) = unit(last.embed_derivative(xi_angle)).transpose();
  } else {
    A.row(2 * g + 1) = unit(last.embed(eta_angle) - mx).transpose();
  }
  Eigen::JacobiSVD<MatrixXd> svd(A, Eigen::ComputeFullV);
  const VectorXd& s = svd.singularValues();
  const int n = g + 3;
  const double smin = n <= s.size() ? s[n - 1] : 0.0;
  const double snext = s[n - 2];
  if (snext < 1e-3 * s[0])
    throw DegenerateNullspace("hyperplane nullspace is not one-dimensional");
  RealHyperplane h;
  h.coeffs = svd.matrixV().col(n - 1);
  if (h.coeffs[g + 1] < 0.0) h.coeffs = -h.coeffs;
  h.residual = smin / s[0];
  h.gap_ratio = smin > 0.0 ? snext / smin : INFINITY;
  return h;
}

VectorXd invert_real_torus(const Jacobian& jac, const JacPoint& target, VectorXd guess) {
  const int g = jac.genus();
  VectorXcd base = VectorXcd::Zero(g);
  for (int i = 1; i <= g; ++i) base += jac.branch_value(Ramification{i, false});
  const JacPoint b = reduce(jac.lattice(), base);
  for (int i = 0; i < g; ++i)
    if (std::abs(wrap_half(b.im[i] - target.im[i])) > kLatticeEps)
      throw NoConvergence("target is not in the component of the real tangency torus");
  const VectorXd T = jac.lattice().real_block * target.re - base.real();
  for (int attempt = 0; attempt < 6; ++attempt) {
    VectorXd phi = guess;
    for (int i = 0; i < g; ++i) phi[i] += 0.7 * attempt * (i + 1);
    if (newton_torus(jac, T, phi) < 1e-12) {
      for (int i = 0; i < g; ++i) phi[i] = std::remainder(phi[i], kTwoPi);
      return phi;
    }
  }
  throw NoConvergence("Newton iteration on the real torus did not converge");
}

// ---------------------------------------------------------------------------

SeifertFamily::SeifertFamily(const Jacobian& jac, const BoundaryData& data)
    : jac_(&jac), data_(data) {
  const int g = jac.genus();
  if (data.genus() != g) throw ConfigError("boundary data genus mismatch");
  rho_shift_ = VectorXd::Zero(g);
  rho_angles_ = VectorXd::Zero(g);
  for (int i = 0; i < g; ++i) {
    if (data.rho[i].prime) {
      rho_shift_ += 0.5 * jac.circle(i + 1).period();
      rho_angles_[i] = kPi;
    }
  }
}

VectorXd SeifertFamily::target(double phi_xi, double phi_eta) const {
  const RealCircle& last = jac_->circle(jac_->genus() + 1);
  return rho_shift_ - 0.5 * (last.increment(phi_xi) + last.increment(phi_eta));
}

VectorXd SeifertFamily::solve(const VectorXd& T, VectorXd phi) const {
  if (!(newton_torus(*jac_, T, phi) < 1e-12)) throw NoConvergence("tangency solve did not converge");
  for (int i = 0; i < phi.size(); ++i) phi[i] = std::remainder(phi[i], kTwoPi);
  return phi;
}

SeifertPoint SeifertFamily::at(double u, double v) const {
  normalize_annulus(u, v);
  // Walk from the nearest singular line, where the tangency points are the
  // chosen ramification points.
  double u0 = std::round(u / kTwoPi) * kTwoPi;
  VectorXd guess = rho_angles_;
  if (std::fmod(u0, 2.0 * kTwoPi) != 0.0)
    for (int i = 0; i < guess.size(); ++i) guess[i] = kPi - guess[i];
  const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(u - u0) / 0.4)));
  for (int s = 1; s < steps; ++s) {
    const double us = u0 + (u - u0) * s / steps;
    guess = solve(target(0.5 * (us - v), 0.5 * (us + v)), guess);
  }
  return at(u, v, guess);
}

SeifertPoint SeifertFamily::at(double u, double v, const VectorXd& guess) const {
  normalize_annulus(u, v);
  SeifertPoint sp;
  sp.data = data_;
  sp.u = u;
  sp.v = v;
  sp.xi_angle = 0.5 * (u - v);
  sp.eta_angle = 0.5 * (u + v);
  sp.branch = u < kTwoPi ? 0 : 1;
  sp.tangency = solve(target(sp.xi_angle, sp.eta_angle), guess);
  const double eps = 1e-12;
  if (std::abs(std::remainder(u, kTwoPi)) < eps)
    sp.kind = SeifertKind::Singular;
  else if (v < eps || std::abs(v - kTwoPi) < eps)
    sp.kind = SeifertKind::Boundary;
  else
    sp.kind = SeifertKind::Interior;
  return sp;
}

SeifertPoint SeifertFamily::from_points(const CurvePoint& xi, const CurvePoint& eta,
                                        int branch) const {
  const BranchConfig& cfg = jac_->config();
  const int last = cfg.intervals();
  for (const CurvePoint* p : {&xi, &eta}) {
    if (p->z.imag() != 0.0 || cfg.interval_of(p->z.real()) != last ||
        std::abs(p->w.imag()) > 1e-12 * (1.0 + std::abs(p->w)))
      throw ConfigError("point is not on the last real circle");
  }
  const RealCircle& c = jac_->circle(last);
  const double a = c.angle_of(xi.z.real(), xi.w.real());
  const double b = c.angle_of(eta.z.real(), eta.w.real());
  double u = a + b, v = b - a;
  normalize_annulus(u, v);
  if ((u < kTwoPi ? 0 : 1) != branch) {
    u = a + kTwoPi + b;
    v = b - a - kTwoPi;
    normalize_annulus(u, v);
  }
  return at(u, v);
}

RealHyperplane SeifertFamily::hyperplane(const SeifertPoint& sp) const {
  return fit_hyperplane(*jac_, sp.tangency, sp.xi_angle, sp.eta_angle);
}

double SeifertFamily::abel_residual(const SeifertPoint& sp) const {
  const int g = jac_->genus();
  VectorXcd acc = jac_->abel_circle(g + 1, sp.xi_angle) + jac_->abel_circle(g + 1, sp.eta_angle);
  for (int i = 0; i < g; ++i) acc += 2.0 * jac_->abel_circle(i + 1, sp.tangency[i]);
  return torus_distance(reduce(jac_->lattice(), acc), jac_origin(g));
}

JacPoint SeifertFamily::singular_point(bool primed) const {
  const int g = jac_->genus();
  VectorXcd acc = VectorXcd::Zero(g);
  for (const auto& r : data_.rho) acc += jac_->branch_value(Ramification{r.index, r.prime != primed});
  return reduce(jac_->lattice(), acc);
}

std::vector<JacPoint> SeifertFamily::boundary_circle(bool last_prime, int samples) const {
  const int g = jac_->genus();
  const double v = last_prime ? kTwoPi : 0.0;
  const int sub = 4;
  std::vector<JacPoint> out;
  VectorXd phi = rho_angles_;
  for (int j = 0; j < samples * sub; ++j) {
    const double u = 2.0 * kTwoPi * j / (samples * sub);
    if (j > 0) phi = solve(target(0.5 * (u - v), 0.5 * (u + v)), phi);
    if (j % sub != 0) continue;
    VectorXcd acc = VectorXcd::Zero(g);
    for (int i = 0; i < g; ++i) acc += jac_->abel_circle(i + 1, phi[i]);
    out.push_back(reduce(jac_->lattice(), acc));
  }
  return out;
}

std::vector<SeifertSurface> enumerate_seifert(const Jacobian& jac, int grid) {
  std::vector<SeifertSurface> out;
  for (const auto& d : all_boundary_data(jac.genus())) {
    SeifertFamily fam(jac, d);
    SeifertSurface s;
    s.data = d;
    s.singular = fam.singular_point(false);
    s.singular_prime = fam.singular_point(true);
    for (int j = 0; j < grid; ++j) {
      const double v = kTwoPi * (j + 0.5) / grid;
      VectorXd guess;
      bool have = false;
      for (int i = 0; i < grid; ++i) {
        const double u = 2.0 * kTwoPi * (i + 0.5) / grid;
        ++s.attempted;
        try {
          SeifertPoint sp = have ? fam.at(u, v, guess) : fam.at(u, v);
          RealHyperplane h = fam.hyperplane(sp);
          guess = sp.tangency;
          have = true;
          s.samples.push_back(sp);
          s.hyperplanes.push_back(h);
        } catch (const NumericalError&) {
          ++s.failures;
          have = false;
        }
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace mtw
