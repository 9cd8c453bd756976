#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "mtw/einstein_weyl.hpp"
#include "mtw/errors.hpp"
#include "support.hpp"

using namespace mtw;
using testing::Gen;
using testing::kPi;

namespace {

constexpr double kTwoPi = 2.0 * kPi;

double coeff_distance(const VectorXd& a, const VectorXd& b) {
  const VectorXd x = a / a.norm(), y = b / b.norm();
  return std::min((x - y).norm(), (x + y).norm());
}

// Distance from c to the polyline through consecutive samples, up to sign.
double polyline_distance(const VectorXd& c, const std::vector<VectorXd>& pts) {
  const VectorXd x = c / c.norm();
  double best = INFINITY;
  for (double s : {1.0, -1.0})
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
      const VectorXd a = pts[i], d = pts[i + 1] - pts[i];
      const VectorXd r = s * x - a;
      const double t = std::clamp(r.dot(d) / d.squaredNorm(), 0.0, 1.0);
      best = std::min(best, (r - t * d).norm());
    }
  return best;
}

EWPoint random_interior(Gen& gen, int k) {
  for (;;) {
    const double u = gen.uniform(0.1, 2 * kTwoPi - 0.1);
    if (std::abs(u - kTwoPi) < 0.1) continue;
    return EWPoint{k, u, gen.uniform(0.1, kTwoPi - 0.1), gen.uniform(-kPi, kPi)};
  }
}

}  // namespace

TEST_CASE("chart examples") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    // On the axis the circle angle is irrelevant.
    const VectorXd a0 = ew_chart(fam, EWPoint{d.k, 0.0, 1.4, 0.0});
    for (double th : {0.5, 2.0, -1.0}) CHECK(coeff_distance(a0, ew_chart(fam, EWPoint{d.k, 0.0, 1.4, th})) < 1e-12);
    CHECK(std::abs(a0[4]) + std::abs(a0[5]) < 1e-12);
    CHECK(coeff_distance(a0, axis_hyperplane(fam, false, jac.circle(3).z(0.7))) < 1e-9);
    const VectorXd a1 = ew_chart(fam, EWPoint{d.k, kTwoPi, 1.4, 0.3});
    CHECK(coeff_distance(a1, axis_hyperplane(fam, true, jac.circle(3).z(kPi - 0.7))) < 1e-9);
    CHECK(EWPoint{d.k, kTwoPi, 1.4, 0.3}.on_axis());

    const EWPoint p{d.k, 1.1, 2.6, 0.4};
    const VectorXd c = ew_chart(fam, p);
    CHECK((c - ew_chart(fam, EWPoint{d.k, 1.1, 2.6, 0.4 + kTwoPi})).norm() < 1e-12);
    CHECK_FALSE(p.on_axis());

    // The half turn is the involution image of the other branch.
    const VectorXd flipped = ew_chart(fam, EWPoint{d.k, 1.1, 2.6, kPi});
    const VectorXd other = ew_chart(fam, EWPoint{d.k, 2 * kTwoPi - 1.1, 2.6, 0.0});
    CHECK(coeff_distance(flipped, other) < 1e-9);
    VectorXd iota = pullback(fam.hyperplane(fam.at(1.1, 2.6)));
    iota[4] = -iota[4];
    CHECK(coeff_distance(iota, other) < 1e-9);
  }
}

TEST_CASE("spacelike geodesic through the disk center") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    const Geodesic geo = geodesic_through_disk_point(fam, 1.5, 0.0);
    CHECK(geo.closure_gap < 1e-6);
    CHECK(geo.simple);
    CHECK(geo.axis_crossings == 1);
    CHECK(geo.axis_prime_crossings == 1);
    CHECK(geo.max_incidence < 1e-9);
    CHECK(geo.transversality > 1e-3);
    CHECK(geo.samples.front().u == doctest::Approx(0.0));
    CHECK(geo.samples.back().u == doctest::Approx(2 * kTwoPi));

    // Swapping the lifts traces the same set.
    const auto lifts = lift_to_surface(cfg, 1.5, 0.0);
    const Geodesic a = geodesic_spacelike(fam, lifts[0], lifts[1], 256);
    const Geodesic b = geodesic_spacelike(fam, lifts[1], lifts[0], 256);
    std::vector<VectorXd> pb;
    for (size_t i = 0; i < b.samples.size(); ++i) pb.push_back(b.coeffs(i));
    for (size_t i = 0; i < a.samples.size(); ++i) CHECK(polyline_distance(a.coeffs(i), pb) < 1e-6);
  }
}

TEST_CASE("degenerate anchors are rejected") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 1));
  const auto lifts = lift_to_surface(cfg, 1.5, 0.3);
  CHECK_THROWS_AS(geodesic_spacelike(fam, lifts[0], lifts[0]), DegenerateAnchor);
  CHECK_THROWS_AS(geodesic_through_disk_point(fam, 1.5, std::sqrt(-cfg.f(1.5))), DegenerateAnchor);
  CHECK_THROWS_AS(geodesic_through_disk_point(fam, 0.0, 0.0), DegenerateAnchor);
}

TEST_CASE("rotated anchors") {
  Gen gen(97);
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 2));
  for (int t = 0; t < 3; ++t) {
    const auto base = lift_to_surface(cfg, gen.uniform(1.1, 1.9), gen.uniform(-0.3, 0.3));
    const double th = gen.uniform(-kPi, kPi);
    const SurfacePoint x = s1_act(th, base[0]), y = s1_act(th, base[1]);
    const Geodesic geo = geodesic_spacelike(fam, x, y, 256);
    CHECK(geo.closure_gap < 1e-6);
    CHECK(geo.simple);
    const VectorXcd mx = surface_embed(2, x), my = surface_embed(2, y);
    for (size_t i = 0; i < geo.samples.size(); i += 7) {
      const VectorXd c = geo.coeffs(i);
      CHECK(std::abs(c.cast<cplx>().dot(mx)) < 1e-9 * mx.norm());
      CHECK(std::abs(c.cast<cplx>().dot(my)) < 1e-9 * my.norm());
    }
  }
}

TEST_CASE("Zoll property on three configurations") {
  for (int g = 1; g <= 3; ++g) {
    const Jacobian jac(canonical_config(g));
    for (const auto& d : all_boundary_data(g)) {
      const SeifertFamily fam(jac, d);
      const ZollReport z = zoll_suite(fam, 5, 1000 + d.k, 256);
      CHECK(z.trials == 5);
      CHECK(z.closed == 5);
      CHECK(z.simple == 5);
      CHECK(z.axis_ok == 5);
      CHECK(z.worst_gap < 1e-6);
    }
  }
}

TEST_CASE("zoll suite is reproducible") {
  const Jacobian jac(canonical_config(2));
  const SeifertFamily fam(jac, boundary_data(2, 1));
  const ZollReport a = zoll_suite(fam, 3, 5, 128), b = zoll_suite(fam, 3, 5, 128);
  for (int i = 0; i < 3; ++i) {
    CHECK(a.geodesics[i].anchor_z == b.geodesics[i].anchor_z);
    CHECK(a.geodesics[i].closure_gap == b.geodesics[i].closure_gap);
  }
}

TEST_CASE("conformal metric is Lorentzian") {
  Gen gen(101);
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    for (int t = 0; t < 50; ++t) {
      const VectorXd c = ew_chart(fam, random_interior(gen, d.k));
      const ConformalMetric M = conformal_metric(cfg, c);
      CHECK(M.lorentzian());
      VectorXd rot = VectorXd::Zero(6);
      rot[4] = c[5];
      rot[5] = -c[4];
      CHECK(M.evaluate(rot) == doctest::Approx(1.0).epsilon(1e-9));
      // The form agrees in sign with the discriminant of a perturbation.
      const MinitwistorLine line = build_line(cfg, c);
      for (int j = 0; j < 3; ++j) {
        const VectorXd delta = M.basis * Eigen::Vector3d(gen.uniform(-1, 1), gen.uniform(-1, 1), gen.uniform(-1, 1));
        const double q = M.evaluate(delta), disc = perturbation_discriminant(cfg, line, delta);
        if (std::abs(q) > 1e-6) CHECK((q > 0) == (disc > 0));
      }
    }
  }
  CHECK_THROWS_AS(conformal_metric(cfg, axis_hyperplane(SeifertFamily(jac, boundary_data(2, 1)), false, 1.5)),
                  DegeneratePoint);
}

TEST_CASE("spacelike tangents are positive, timelike ones negative") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    const Geodesic geo = geodesic_through_disk_point(fam, 1.4, 0.2, 256);
    for (size_t i = 3; i + 1 < geo.samples.size(); i += 16) {
      const VectorXd c = geo.coeffs(i);
      if (std::hypot(c[4], c[5]) < 1e-2) continue;
      VectorXd t = geo.coeffs(i + 1) - geo.coeffs(i - 1);
      t -= c * c.dot(t);
      CHECK(conformal_metric(cfg, c).evaluate(t) > 0.0);
    }

    const EWPoint start{d.k, 1.2, 2.5, 0.8};
    const MinitwistorLine line = build_line(cfg, ew_chart(fam, start));
    const SurfacePoint q = line_point(cfg, line, cplx(1.0, 0.3));
    CHECK_FALSE(is_real(q));
    const TimelikeTrace tr = timelike_geodesic(fam, start, q, 20, 0.02);
    REQUIRE(tr.points.size() == 21);
    const VectorXcd mq = surface_embed(2, q);
    for (size_t i = 0; i < tr.points.size(); ++i) {
      CHECK(tr.form_values[i] < 0.0);
      CHECK(std::abs(ew_chart(fam, tr.points[i]).cast<cplx>().dot(mq)) < 1e-9 * mq.norm());
    }
  }
}

TEST_CASE("null cones rotate with the circle action") {
  Gen gen(103);
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 1));
  for (int t = 0; t < 20; ++t) {
    const EWPoint p = random_interior(gen, 1);
    const double th = gen.uniform(-kPi, kPi);
    const VectorXd c = ew_chart(fam, p);
    const ConformalMetric M = conformal_metric(cfg, c);
    const ConformalMetric N = conformal_metric(cfg, s1_act(th, c));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(M.matrix);
    const Eigen::Vector3d lam = es.eigenvalues();
    REQUIRE(lam[0] < 0.0);
    for (int j = 0; j < 12; ++j) {
      const double s = kTwoPi * j / 12;
      const Eigen::Vector3d x = es.eigenvectors() * Eigen::Vector3d(1.0 / std::sqrt(-lam[0]),
                                                                     std::cos(s) / std::sqrt(lam[1]),
                                                                     std::sin(s) / std::sqrt(lam[2]));
      const VectorXd delta = M.basis * x;
      CHECK(std::abs(M.evaluate(delta)) < 1e-10 * delta.squaredNorm() * M.matrix.norm());
      const VectorXd moved = s1_act(th, delta);
      CHECK(std::abs(N.evaluate(moved)) < 1e-8 * moved.squaredNorm() * N.matrix.norm());
    }
  }
}

TEST_CASE("null surfaces through a real point") {
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const SeifertFamily fam(jac, boundary_data(2, 2));
  const SurfacePoint q = lift_to_surface(cfg, 1.3, 0.5)[0];
  const NullSurface ns = null_surface(fam, q, 6, 128);
  CHECK(ns.slices.size() >= 4);
  CHECK(ns.max_incidence < 1e-9);
  CHECK(ns.max_degeneracy < 1e-8);
  CHECK(ns.min_restricted > -1e-8);
  CHECK_THROWS_AS(null_surface(fam, lift_to_surface(cfg, -1.5, 0.1)[0]), DegenerateAnchor);
}

TEST_CASE("foliation of the disk") {
  const Jacobian jac(canonical_config(2));
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    for (double xi : {0.3, 2.2}) {
      const FoliationReport f = foliation_check(fam, xi, 100, 64);
      CHECK(f.pass());
      CHECK(f.min_distance > 1e-4);
    }
  }
}

TEST_CASE("disk coordinates round-trip") {
  Gen gen(107);
  const BranchConfig cfg = canonical_config(3);
  for (int t = 0; t < 50; ++t) {
    const double z = gen.uniform(2.01, 2.99);
    const double lim = std::sqrt(-cfg.f(z));
    const double w = gen.uniform(-lim, lim);
    const DiskPoint p = to_disk(cfg, z, w);
    CHECK(std::hypot(p.X, p.Y) < 1.0);
    double z2, w2;
    from_disk(cfg, p, z2, w2);
    CHECK(std::abs(z2 - z) < 1e-12);
    CHECK(std::abs(w2 - w) < 1e-10);
  }
}

TEST_CASE("geodesics recover every tangent hyperplane through the anchors") {
  // Independent search: hyperplanes P(z) + w = 0 through (z_d, 0) with a
  // double contact at z_1 in K_1 and z_2 in K_2. For fixed z_1 the five
  // linear conditions on the four coefficients of P are consistent exactly
  // where the 5x5 augmented determinant vanishes; scan z_2 for its zeros.
  const BranchConfig cfg = canonical_config(2);
  const Jacobian jac(cfg);
  const double zd = 1.5;
  std::vector<std::vector<VectorXd>> traces;
  for (const auto& d : all_boundary_data(2)) {
    const SeifertFamily fam(jac, d);
    const Geodesic geo = geodesic_through_disk_point(fam, zd, 0.0, 1024);
    std::vector<VectorXd> pts;
    for (size_t i = 0; i < geo.samples.size(); ++i) pts.push_back(geo.coeffs(i));
    traces.push_back(pts);
  }
  auto R = [&](double z) { return std::sqrt(-cfg.f(z)); };
  auto dR = [&](double z) { return -cfg.f_poly().derivative()(z) / (2.0 * R(z)); };
  auto system = [&](double z1, double z2, int s1, int s2) {
    Eigen::Matrix<double, 5, 5> M;
    auto rows = [&](int r, double z, int s) {
      M.row(r) << 1, z, z * z, z * z * z, s * R(z);
      M.row(r + 1) << 0, 1, 2 * z, 3 * z * z, s * dR(z);
    };
    rows(0, z1, s1);
    rows(2, z2, s2);
    M.row(4) << 1, zd, zd * zd, zd * zd * zd, 0.0;
    return M;
  };
  int found = 0, regular = 0;
  double worst = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double z1 = -5.0 + (i + 0.5) / 40.0;
    for (int s1 : {-1, 1})
      for (int s2 : {-1, 1}) {
        const int n = 400;
        double prev_z = -2.0 + 0.5 / n, prev = system(z1, prev_z, s1, s2).determinant();
        for (int j = 1; j < n; ++j) {
          const double z2 = -2.0 + (j + 0.5) / n;
          const double val = system(z1, z2, s1, s2).determinant();
          if ((val > 0) != (prev > 0)) {
            double lo = prev_z, hi = z2, flo = prev;
            for (int it = 0; it < 60; ++it) {
              const double mid = 0.5 * (lo + hi), fm = system(z1, mid, s1, s2).determinant();
              if ((fm > 0) == (flo > 0)) {
                lo = mid;
                flo = fm;
              } else {
                hi = mid;
              }
            }
            const auto M = system(z1, 0.5 * (lo + hi), s1, s2);
            const Eigen::Vector4d P = M.leftCols<4>().colPivHouseholderQr().solve(-M.col(4));
            VectorXd c = VectorXd::Zero(6);
            c.head(4) = P;
            c[4] = 1.0;
            ++found;
            try {
              if (build_line(cfg, c).kind != LineKind::Regular) continue;
            } catch (const NotInFamily&) {
              continue;
            }
            ++regular;
            double best = INFINITY;
            for (const auto& tr : traces) best = std::min(best, polyline_distance(c, tr));
            worst = std::max(worst, best);
          }
          prev = val;
          prev_z = z2;
        }
      }
  }
  CHECK(regular > 20);
  CHECK(found >= regular);
  CHECK(worst < 1e-3);
}
