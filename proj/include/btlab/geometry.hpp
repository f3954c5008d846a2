#pragma once

#include <cmath>
#include <string>
#include <vector>

namespace btlab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double c) const { return {c * x, c * y}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }

/// Interpolating cubic spline through values on uniformly spaced knots,
/// extended periodically (period = n * dx).
class PeriodicSpline {
 public:
  PeriodicSpline() = default;
  PeriodicSpline(double x0, double dx, std::vector<double> values);

  double operator()(double x) const;
  double derivative(double x) const;

 private:
  double x0_ = 0.0, dx_ = 1.0;
  std::vector<double> y_;   // knot values
  std::vector<double> m_;   // knot second derivatives
};

/// Closed planar curve, given by a smooth preset formula or by uniformly
/// sampled points (interpolated with a periodic cubic spline). Presets are
/// parametrized by t in [0, 2*pi).
class ParametricCurve {
 public:
  ParametricCurve() = default;   // unit circle at the origin

  static ParametricCurve shifted_disk(double radius, Vec2 center);
  static ParametricCurve ellipse(double a, double b, Vec2 center);
  /// r(phi) = r0 * (1 + sum_k cos_coef[k-1] cos(k phi) + sin_coef[k-1] sin(k phi)),
  /// traced as center + r(phi) (cos phi, sin phi).
  static ParametricCurve fourier_circle(double r0, std::vector<double> cos_coef,
                                        std::vector<double> sin_coef, Vec2 center);
  /// Closed curve through uniformly spaced samples (no duplicated endpoint).
  static ParametricCurve from_samples(const std::vector<Vec2>& points);

  double period() const { return period_; }
  bool sampled() const { return kind_ == Kind::sampled; }

  Vec2 position(double t) const;
  Vec2 derivative(double t) const;
  Vec2 second_derivative(double t) const;

  /// Mirror image under x -> -x; exact for formula kinds, resampled at the
  /// original sample knots for sampled curves.
  ParametricCurve reflected_x() const;

 private:
  enum class Kind { shifted_disk, ellipse, fourier_circle, sampled };

  Kind kind_ = Kind::shifted_disk;
  double period_ = 2.0 * M_PI;
  Vec2 center_;
  double a_ = 1.0, b_ = 1.0;              // radii (disk: a_ = b_ = r)
  double r0_ = 1.0;
  std::vector<double> cos_coef_, sin_coef_;
  PeriodicSpline sx_, sy_;                // sampled interpolants
  int n_samples_ = 0;
};

/// Arc-length table of a closed curve. The parameter s runs over [-L, L) at
/// uniform spacing, s = 0 sits at the leftmost point A0 (translated to the
/// origin), and the traversal direction is normalized so the tangent at A0 is
/// (0, +1). normal is the outward unit normal and kappa the curvature in the
/// outward Frenet convention n'(s) = kappa(s) gamma'(s), which makes kappa
/// independent of the traversal direction (kappa = +1 on a unit disk).
struct CurveTable {
  double L = 0.0;             // half perimeter
  double delta_max = 0.0;     // 0.9 / max |kappa|
  double speed_err = 0.0;     // max | |dgamma/ds| - 1 | over the table
  std::vector<double> s;
  std::vector<Vec2> gamma;
  std::vector<Vec2> normal;
  std::vector<double> kappa;

  double wrap(double sq) const;   // reduce into [-L, L)
  Vec2 gamma_at(double s) const;
  Vec2 normal_at(double s) const;
  double kappa_at(double s) const;
  double gamma1_at(double s) const { return gamma_at(s).x; }
  double normal1_at(double s) const { return normal_at(s).x; }

  PeriodicSpline sp_gx, sp_gy, sp_nx, sp_ny, sp_kappa;
};

/// Reparametrize a closed curve by arc length into a CurveTable with n_nodes
/// uniform s nodes. The cumulative length is integrated with composite
/// Simpson on a dense parameter grid and inverted with a monotone cubic
/// interpolant; table entries are then evaluated from the exact parametric
/// derivatives, so the resampled speed error stays below 1e-8.
/// Sampled curves are additionally checked to be simple (segment scan).
CurveTable arclength_reparametrize(const ParametricCurve& curve, int n_nodes = 2048);

/// Extremal points of gamma_1 over the table and the nondegeneracy flags the
/// localized solves rely on.
struct ExtremalReport {
  Vec2 a0, a1;                 // argmin / argmax of gamma_1
  double s_min = 0.0, s_max = 0.0;
  double kappa0 = 0.0, kappa1 = 0.0;
  double x1_min = 0.0, x1_max = 0.0;
  bool unique_min = false, unique_max = false;
  bool nondegenerate_min = false, nondegenerate_max = false;  // kappa > 0 there
  bool assumption_min = false;   // unique && nondegenerate
  bool assumption_max = false;
};

/// Locate A0/A1 on the table: node scan, then golden-section refinement of
/// the spline to 1e-10 in s. Uniqueness demands no second local extremum
/// within 1e-6 * (x1_max - x1_min) of the extremal value.
ExtremalReport locate_extremal_points(const CurveTable& table);

/// Tube chart Gamma(s, t) = gamma(s) - t * n(s). Requires |t| < delta_max.
Vec2 tubular_map(const CurveTable& table, double s, double t);

} // namespace btlab
