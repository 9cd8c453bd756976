#pragma once

#include <vector>

#include "mtw/surface.hpp"

namespace mtw {

// Point of M_k in the chart (u, v, theta): (u, v) annulus coordinates of the
// Seifert surface, theta the circle angle. (u, v, theta) and (4 pi - u, v,
// theta + pi) are the same point; u = 0 and u = 2 pi are the two axes, where
// theta is irrelevant.
struct EWPoint {
  int k = 1;
  double u = 0.0, v = 0.0, theta = 0.0;
  bool on_axis(double tol = 1e-12) const;
};

// Unit coefficients (c_0, ..., c_{g+1}, c_w, c_y) of the line at an EW point.
VectorXd ew_chart(const SeifertFamily& fam, const EWPoint& p);
// Section through the fibers over the chosen branch points and z = lam:
// rho_i for the first axis, rho'_i for the second.
VectorXd axis_hyperplane(const SeifertFamily& fam, bool primed, double lam);

// Orthonormal basis (columns) of the 3-dimensional space of coefficient
// perturbations orthogonal to coeffs that keep the g nodes.
MatrixXd tangent_basis(const BranchConfig& cfg, const MinitwistorLine& line);

struct ConformalMetric {
  VectorXd coeffs;
  MatrixXd basis;   // (g+4) x 3
  Eigen::Matrix3d matrix;  // scaled so the circle direction has value 1
  Eigen::Vector3d eigenvalues;
  int negative = 0, positive = 0;
  bool lorentzian() const { return negative == 1 && positive == 2; }
  // Value of the form on a coefficient perturbation.
  double evaluate(const VectorXd& delta) const;
};

// The form is positive when a perturbation meets the real circle in two
// points, zero when they coalesce and negative for a conjugate pair.
ConformalMetric conformal_metric(const BranchConfig& cfg, const VectorXd& coeffs);
// Discriminant of a single perturbation on a regular line (unnormalized).
double perturbation_discriminant(const BranchConfig& cfg, const MinitwistorLine& line,
                                 const VectorXd& delta);

struct GeodesicSample {
  double u = 0.0;  // lifted, runs from 0 to 4 pi
  double v = 0.0;
  VectorXd coeffs;  // unit, sign-continuous along the trace
  VectorXd tangency;
};

struct Geodesic {
  SurfacePoint x, y;
  double theta = 0.0;  // rotation carrying the traced slice onto the anchors
  double anchor_z = 0.0, anchor_w = 0.0;
  std::vector<GeodesicSample> samples;
  double closure_gap = 0.0;
  bool simple = true;
  double min_separation = 0.0;
  int axis_crossings = 0;        // through u = 0 mod 4 pi
  int axis_prime_crossings = 0;  // through u = 2 pi mod 4 pi
  double transversality = 0.0;   // smallest over samples
  double max_incidence = 0.0;    // largest |c . m(x)| over samples

  // Coefficients on the big space, rotated onto the anchors.
  VectorXd coeffs(size_t i) const;
};

// Geodesic through two real points of the last sphere lying over a common z.
Geodesic geodesic_spacelike(const SeifertFamily& fam, const SurfacePoint& x,
                            const SurfacePoint& y, int steps = 512);
// Anchors given as a point (z, w) of the open disk; the lifts are (z, w, +-y).
Geodesic geodesic_through_disk_point(const SeifertFamily& fam, double z, double w,
                                     int steps = 512);

struct ZollReport {
  int trials = 0;
  int closed = 0, simple = 0, axis_ok = 0;
  double worst_gap = 0.0;
  double worst_transversality = INFINITY;
  std::vector<Geodesic> geodesics;
};

// Random anchors drawn from the seeded generator.
ZollReport zoll_suite(const SeifertFamily& fam, int trials, unsigned long long seed,
                      int steps = 512);

// Disk coordinates: the open disk over the last interval mapped to the unit disk.
struct DiskPoint {
  double X, Y;
};
DiskPoint to_disk(const BranchConfig& cfg, double z, double w);
void from_disk(const BranchConfig& cfg, const DiskPoint& p, double& z, double& w);

struct FoliationReport {
  double xi_angle = 0.0;
  int arcs = 0;
  double min_distance = INFINITY;  // between distinct arcs away from xi
  double coverage = 0.0;           // fraction of grid points crossed exactly once
  double second_lap_coverage = 0.0;
  double end_radius_low = 0.0, end_radius_high = 0.0;  // extent of the first and last arcs
  int grid_points = 0;
  bool pass(double min_dist = 1e-4, double min_cover = 0.999) const {
    return min_distance > min_dist && coverage >= min_cover && second_lap_coverage >= min_cover;
  }
};

FoliationReport foliation_check(const SeifertFamily& fam, double xi_angle, int grid = 200,
                                 int arcs = 96);

// Lines through a real point q of the last sphere: for each theta the traced
// slice is the geodesic through the rotated anchor.
struct NullSurface {
  std::vector<double> thetas;
  std::vector<Geodesic> slices;
  double max_incidence = 0.0;   // largest |c . m(q)|
  double max_degeneracy = 0.0;  // largest |det| / norm^2 of the restricted form
  double min_restricted = 0.0;  // most negative restricted eigenvalue (relative)
};

NullSurface null_surface(const SeifertFamily& fam, const SurfacePoint& q, int thetas = 8,
                         int steps = 128);

// Local check of the 2-plane of lines through q at a line containing q:
// returns the restricted 2x2 form.
Eigen::Matrix2d restricted_form(const BranchConfig& cfg, const VectorXd& coeffs,
                                const SurfacePoint& q);

// Lines through a non-real point q: one-parameter family traced by
// continuation in (u, v, theta) from a line containing q.
struct TimelikeTrace {
  std::vector<EWPoint> points;
  std::vector<double> form_values;  // metric value of the tangent at each point
};

TimelikeTrace timelike_geodesic(const SeifertFamily& fam, const EWPoint& start,
                                const SurfacePoint& q, int steps = 40, double step = 0.02);

// A non-real point on the line at p, at complex circle parameter psi.
SurfacePoint line_point(const BranchConfig& cfg, const MinitwistorLine& line, cplx psi);

}  // namespace mtw
