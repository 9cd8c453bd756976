#include <doctest.h>

#include <algorithm>
#include <set>

#include <Eigen/Eigenvalues>

#include "mtw/einstein_weyl.hpp"
#include "mtw/errors.hpp"
#include "mtw/surface.hpp"
#include "support.hpp"

using namespace mtw;
using testing::Gen;
using testing::kPi;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool same_cp1(const CP1& a, const CP1& b, double tol = 1e-9) {
  const double n = std::hypot(std::abs(a.a), std::abs(a.b)) * std::hypot(std::abs(b.a), std::abs(b.b));
  return std::abs(a.a * b.b - a.b * b.a) <= tol * n;
}

SurfacePoint random_surface_point(Gen& gen, const BranchConfig& cfg) {
  const auto lifts = lift_to_surface(cfg, gen.complex(3.0) + cfg.points[cfg.points.size() / 2], gen.complex(3.0));
  return lifts[gen.uniform() < 0.5 ? 0 : 1];
}

double coeff_distance(const VectorXd& a, const VectorXd& b) {
  const VectorXd x = a / a.norm(), y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

bool on_section(const BranchConfig& cfg, const VectorXd& c, const SurfacePoint& p, double tol) {
  const VectorXcd m = surface_embed(cfg.genus, p);
  return std::abs(c.cast<cplx>().dot(m)) <= tol * (1.0 + m.norm());
}

}  // namespace

TEST_CASE("lifts to the surface") {
  const BranchConfig cfg = canonical_config(2);
  // Over the curve the two lifts coincide with y = 0.
  const CurvePoint p = curve_point(cfg, cplx(0.3, 0.7), Sheet::Plus);
  const auto on = lift_to_surface(cfg, p.z, p.w);
  CHECK(std::abs(on[0].y()) < 1e-5);
  CHECK(std::abs(on[0].u - on[1].u) < 1e-6);

  // w^2 > -f gives a conjugate pair.
  const double z = 1.5, w = std::sqrt(-cfg.f(z)) + 1.0;
  const auto pair = lift_to_surface(cfg, z, w);
  CHECK_FALSE(is_real(pair[0]));
  const SurfacePoint s = real_structure(pair[0]);
  CHECK(std::abs(s.u - pair[1].u) + std::abs(s.v - pair[1].v) < 1e-12);

  // Inside the disk over K_3: two real points on the third sphere.
  const auto real = lift_to_surface(cfg, 1.5, 0.0);
  for (const auto& q : real) {
    CHECK(is_real(q));
    CHECK(real_sphere_of(cfg, q) == 3);
    CHECK(surface_residual(cfg, q) < 1e-14);
  }
  CHECK(std::abs(real[0].y() + real[1].y()) < 1e-14);
}

TEST_CASE("circle action") {
  Gen gen(61);
  const BranchConfig cfg = canonical_config(2);
  const SurfacePoint x = random_surface_point(gen, cfg);
  const SurfacePoint id = s1_act(0.0, x);
  CHECK(std::abs(id.u - x.u) + std::abs(id.v - x.v) == 0.0);

  VectorXd c(6);
  c << 0.1, -0.2, 0.3, 0.4, 0.5, 0.0;
  const VectorXd flipped = s1_act(kPi, c);
  CHECK(std::abs(flipped[4] + 0.5) < 1e-15);
  CHECK(std::abs(flipped[5]) < 1e-15);
  CHECK((flipped.head(4) - c.head(4)).norm() == 0.0);

  for (int t = 0; t < 100; ++t) {
    const SurfacePoint p = random_surface_point(gen, cfg);
    const double th = gen.uniform(-kPi, kPi);
    const SurfacePoint a = real_structure(s1_act(th, p)), b = s1_act(th, real_structure(p));
    CHECK(std::abs(a.u - b.u) + std::abs(a.v - b.v) + std::abs(a.z - b.z) < 1e-12 * (1.0 + std::abs(p.u) + std::abs(p.v)));
    CHECK(surface_residual(cfg, s1_act(th, p)) < 1e-12);
    VectorXd h(6);
    for (int i = 0; i < 6; ++i) h[i] = gen.uniform(-1, 1);
    const cplx before = h.cast<cplx>().dot(surface_embed(2, p));
    const cplx after = s1_act(th, h).cast<cplx>().dot(surface_embed(2, s1_act(th, p)));
    CHECK(std::abs(before - after) < 1e-12 * (1.0 + std::abs(before) + surface_embed(2, p).norm()));
  }
  // Real spheres are preserved.
  const auto real = lift_to_surface(cfg, 1.5, 0.4);
  for (double th : {0.3, 1.7, 3.0}) CHECK(real_sphere_of(cfg, s1_act(th, real[0])) == 3);
}

TEST_CASE("real locus has g+1 components") {
  Gen gen(67);
  for (int g = 1; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    std::vector<double> zs;
    const double lo = cfg.points.front() - 1.0, hi = cfg.points.back() + 1.0;
    for (int t = 0; t < 20000; ++t) {
      const auto lifts = lift_to_surface(cfg, gen.uniform(lo, hi), gen.uniform(-4.0, 4.0));
      if (!is_real(lifts[0]) || std::abs(lifts[0].y()) < 1e-9) continue;
      CHECK(lifts[0].chart == SurfacePoint::Chart::Affine);
      zs.push_back(lifts[0].z.real());
    }
    std::sort(zs.begin(), zs.end());
    REQUIRE_FALSE(zs.empty());
    int clusters = 1;
    for (size_t i = 1; i < zs.size(); ++i)
      if (zs[i] - zs[i - 1] > 0.2) ++clusters;
    CHECK(clusters == g + 1);
    std::set<int> spheres;
    for (double z : zs) spheres.insert(cfg.interval_of(z));
    CHECK(static_cast<int>(spheres.size()) == g + 1);
    CHECK_FALSE(spheres.count(0));
  }
}

TEST_CASE("regular lines from Seifert hyperplanes") {
  Gen gen(71);
  for (int g = 1; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    const Jacobian jac(cfg);
    const RealCircle& last = jac.circle(g + 1);
    for (const auto& d : all_boundary_data(g)) {
      const SeifertFamily fam(jac, d);
      for (int t = 0; t < 15; ++t) {
        const double u = gen.uniform(0.2, 2 * kTwoPi - 0.2), v = gen.uniform(0.2, kTwoPi - 0.2);
        if (std::abs(u - kTwoPi) < 0.2) continue;
        const SeifertPoint sp = fam.at(u, v);
        const VectorXd c = pullback(fam.hyperplane(sp));
        const MinitwistorLine line = build_line(cfg, c);
        CHECK(line.kind == LineKind::Regular);
        REQUIRE(static_cast<int>(line.nodes.size()) == g);
        for (int i = 0; i < g; ++i) {
          CHECK(cfg.interval_of(line.nodes[i].z) == i + 1);
          CHECK(std::abs(line.nodes[i].z - jac.circle(i + 1).z(sp.tangency[i])) < 1e-6);
        }
        CHECK(line.node_margin > 0.0);
        const double zx = last.z(sp.xi_angle), ze = last.z(sp.eta_angle);
        CHECK(std::abs(line.arc_lo - std::min(zx, ze)) < 1e-7);
        CHECK(std::abs(line.arc_hi - std::max(zx, ze)) < 1e-7);
        for (const auto& q : line.circle) {
          const SurfacePoint p = SurfacePoint::from_zwy(q.z, q.w, q.y);
          CHECK(surface_residual(cfg, p) < 1e-9);
          CHECK(on_section(cfg, line.coeffs, p, 1e-9));
          CHECK(real_sphere_of(cfg, p) == g + 1);
        }
      }
    }
  }
}

TEST_CASE("axis sections are irregular") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    for (bool primed : {false, true}) {
      const VectorXd c = axis_hyperplane(fam, primed, 1.3);
      const MinitwistorLine line = build_line(cfg, c);
      CHECK(line.kind == LineKind::Irregular);
      CHECK(line.conic_z == doctest::Approx(1.3));
      REQUIRE(line.line_feet.size() == 2);
      for (int i = 0; i < 2; ++i) {
        const bool p = d.rho[i].prime != primed;
        CHECK(line.line_feet[i] == (p ? cfg.lambda_prime(i + 1) : cfg.lambda(i + 1)));
      }
    }
  }
}

TEST_CASE("random hyperplanes are not minitwistor lines") {
  Gen gen(73);
  const BranchConfig cfg = canonical_config(2);
  int rejected = 0;
  for (int t = 0; t < 50; ++t) {
    VectorXd c(6);
    for (int i = 0; i < 6; ++i) c[i] = gen.uniform(-1, 1);
    try {
      build_line(cfg, c);
    } catch (const NotInFamily&) {
      ++rejected;
    }
  }
  CHECK(rejected == 50);
  CHECK_THROWS_AS(build_line(cfg, VectorXd::Ones(5)), ConfigError);
}

TEST_CASE("only the half turn keeps a Seifert line in the Seifert family") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 1));
  const VectorXd c = pullback(fam.hyperplane(fam.at(1.0, 2.0)));
  for (int j = 0; j < 64; ++j) {
    const double th = kTwoPi * j / 64;
    const bool flat = std::abs(s1_act(th, c)[5]) < 1e-12;
    CHECK(flat == (j == 0 || j == 32));
  }
}

TEST_CASE("families for different k do not share hyperplanes") {
  for (int g = 2; g <= 3; ++g) {
    const Jacobian jac(canonical_config(g));
    const auto surfaces = enumerate_seifert(jac, 12);
    for (size_t a = 0; a < surfaces.size(); ++a)
      for (size_t b = a + 1; b < surfaces.size(); ++b) {
        double m = INFINITY;
        for (const auto& x : surfaces[a].hyperplanes)
          for (const auto& y : surfaces[b].hyperplanes) m = std::min(m, coeff_distance(x.coeffs, y.coeffs));
        CHECK(m > 1e-3);
      }
  }
}

TEST_CASE("a nearby member meets the line in 2g+2 points") {
  Gen gen(79);
  for (int g = 1; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    const Jacobian jac(cfg);
    const SeifertFamily fam(jac, boundary_data(g, 1));
    for (int t = 0; t < 5; ++t) {
      const double u = gen.uniform(0.5, 5.5), v = gen.uniform(0.5, 5.5), th = gen.uniform(0, kTwoPi);
      const VectorXd c = ew_chart(fam, EWPoint{1, u, v, th});
      const VectorXd c2 = ew_chart(fam, EWPoint{1, u + 0.05, v - 0.04, th + 0.03});
      const MinitwistorLine line = build_line(cfg, c);
      // t^{g+1} (c2 . m)(psi) with t = e^{i psi} is a polynomial of degree
      // 2g+2; recover its coefficients by sampling on the unit circle.
      const int deg = 2 * g + 2, n = 4 * deg;
      VectorXcd vals(n);
      for (int j = 0; j < n; ++j) {
        const double psi = kTwoPi * j / n;
        const SurfacePoint p = line_point(cfg, line, psi);
        vals[j] = std::polar(1.0, (g + 1) * psi) * c2.cast<cplx>().dot(surface_embed(g, p));
      }
      VectorXcd coef = VectorXcd::Zero(n);
      for (int k = 0; k < n; ++k) {
        for (int j = 0; j < n; ++j) coef[k] += vals[j] * std::polar(1.0, -kTwoPi * j * k / n);
        coef[k] /= n;
      }
      CHECK(coef.tail(n - deg - 1).norm() < 1e-10 * coef.norm());
      CHECK(std::abs(coef[0]) > 1e-8 * coef.norm());
      CHECK(std::abs(coef[deg]) > 1e-8 * coef.norm());
      // Roots via the companion matrix.
      MatrixXcd comp = MatrixXcd::Zero(deg, deg);
      for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
      for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coef[i] / coef[deg];
      Eigen::ComplexEigenSolver<MatrixXcd> es(comp, false);
      for (int i = 0; i < deg; ++i) {
        const cplx psi = cplx(0.0, -1.0) * std::log(es.eigenvalues()[i]);
        const SurfacePoint p = line_point(cfg, line, psi);
        CHECK(surface_residual(cfg, p) < 1e-8);
        CHECK(on_section(cfg, c, p, 1e-8));
        CHECK(on_section(cfg, c2, p, 1e-6));
      }
    }
  }
}

TEST_CASE("hyperplanes restricted to a regular line span g+3 dimensions") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 2));
  const VectorXd c = ew_chart(fam, EWPoint{2, 1.2, 2.5, 0.8});
  const MinitwistorLine line = build_line(cfg, c);
  MatrixXcd rows(24, 6);
  for (int j = 0; j < 24; ++j) {
    const cplx psi(0.3 * j, 0.1 * (j % 5) - 0.2);
    rows.row(j) = surface_embed(2, line_point(cfg, line, psi)).transpose();
  }
  Eigen::JacobiSVD<MatrixXcd> svd(rows, Eigen::ComputeFullV);
  const auto s = svd.singularValues();
  CHECK(s[4] > 1e-6 * s[0]);
  CHECK(s[5] < 1e-12 * s[0]);
  const VectorXcd null = svd.matrixV().col(5);
  const cplx phase = null.dot(c.cast<cplx>());
  CHECK(std::abs(std::abs(phase) - c.norm()) < 1e-9);
}

TEST_CASE("quadric cover ramification images") {
  for (int g = 2; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    for (const auto& d : all_boundary_data(g)) {
      for (bool hatted : {false, true}) {
        const QuadricCover qc(cfg, d, hatted);
        for (double z : qc.designated()) {
          const QuadricImage q = qc.project(SurfacePoint::from_zwy(z, 0.0, 0.0));
          CHECK(q.first.is_zero());
          CHECK(q.second.is_infinity());
        }
        for (double z : qc.complement()) {
          const QuadricImage q = qc.project(SurfacePoint::from_zwy(z, 0.0, 0.0));
          CHECK(q.first.is_infinity());
          CHECK(q.second.is_zero());
        }
        SurfacePoint inf;
        inf.chart = SurfacePoint::Chart::Infinity;
        const QuadricImage a = qc.project(inf), b = qc.project(real_structure(inf));
        CHECK((a.first.is_zero() && a.second.is_zero()));
        CHECK((b.first.is_infinity() && b.second.is_infinity()));
      }
      const QuadricCover plain(cfg, d, false);
      CHECK(plain.designated().back() == cfg.lambda(g + 1));
      CHECK(QuadricCover(cfg, d, true).designated().back() == cfg.lambda_prime(g + 1));
    }
  }
}

TEST_CASE("quadric cover is equivariant and finite of degree g+1") {
  Gen gen(83);
  for (int g = 2; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    for (const auto& d : all_boundary_data(g)) {
      const QuadricCover qc(cfg, d, gen.uniform() < 0.5);
      for (int t = 0; t < 30; ++t) {
        const SurfacePoint p = random_surface_point(gen, cfg);
        const QuadricImage q = qc.project(p);
        const QuadricImage s = qc.project(real_structure(p)), ts = target_real_structure(q);
        CHECK(same_cp1(s.first, ts.first));
        CHECK(same_cp1(s.second, ts.second));
        const double th = gen.uniform(-kPi, kPi);
        const QuadricImage r = qc.project(s1_act(th, p));
        const cplx e = std::polar(1.0, -th);
        CHECK(same_cp1(r.first, CP1{e * q.first.a, q.first.b}));
        CHECK(same_cp1(r.second, CP1{e * q.second.a, q.second.b}));

        const cplx q1 = gen.complex(2.0), q2 = gen.complex(2.0);
        const auto fib = qc.fiber(q1, q2);
        CHECK(static_cast<int>(fib.size()) == g + 1);
        for (const auto& x : fib) {
          CHECK(surface_residual(cfg, x) < 1e-9);
          const QuadricImage back = qc.project(x);
          CHECK(same_cp1(back.first, CP1{q1, 1.0}, 1e-8));
          CHECK(same_cp1(back.second, CP1{q2, 1.0}, 1e-8));
        }
      }
    }
  }
}

TEST_CASE("real fibers have one point per real sphere") {
  Gen gen(89);
  for (int g = 2; g <= 3; ++g) {
    const BranchConfig cfg = canonical_config(g);
    for (const auto& d : all_boundary_data(g)) {
      const QuadricCover qc(cfg, d, false);
      for (int t = 0; t < 30; ++t) {
        const cplx q1 = std::polar(gen.uniform(0.1, 5.0), gen.uniform(-kPi, kPi));
        const auto fib = qc.fiber(q1, 1.0 / std::conj(q1));
        REQUIRE(static_cast<int>(fib.size()) == g + 1);
        std::set<int> spheres;
        for (const auto& x : fib) spheres.insert(real_sphere_of(cfg, x, 1e-8));
        CHECK(static_cast<int>(spheres.size()) == g + 1);
        CHECK_FALSE(spheres.count(0));
      }
    }
  }
}

TEST_CASE("boundary sections") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const RealCircle& last = jac.circle(3);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    for (bool hatted : {false, true}) {
      const QuadricCover qc(cfg, d, hatted);
      for (double phi : {0.4, 1.3, 2.2, 3.9, 5.1}) {
        const SurfacePoint x = SurfacePoint::from_zwy(last.z(phi), last.w(phi), 0.0);
        const QuadricImage q = qc.project(x);
        const MinitwistorLine line = qc.boundary_section(q.first.value());
        CHECK(line.kind == LineKind::Boundary);
        REQUIRE(line.nodes.size() == 3);
        CHECK(std::abs(line.nodes[2].z - last.z(phi)) < 1e-7);
        CHECK(std::abs(line.nodes[2].w - last.w(phi)) < 1e-6);
        for (const auto& n : line.nodes) {
          const SurfacePoint p = SurfacePoint::from_zwy(n.z, n.w, n.y);
          CHECK(surface_residual(cfg, p) < 1e-9);
          CHECK(is_real(p));
        }

        // Interior Seifert hyperplanes converge to it as v -> 0 (plain) or
        // v -> 2 pi (hatted), with xi = eta at angle phi.
        double prev = INFINITY;
        for (double eps : {1e-1, 1e-2, 1e-3, 1e-4}) {
          const double v = hatted ? kTwoPi - eps : eps;
          const double u = hatted ? 2.0 * phi + kTwoPi : 2.0 * phi;
          const VectorXd c = pullback(fam.hyperplane(fam.at(u, v)));
          const double dist = coeff_distance(c, qc.boundary_coeffs(q.first.value()));
          CHECK(dist < prev);
          prev = dist;
        }
        CHECK(prev < 1e-3);
      }
    }
  }
}
