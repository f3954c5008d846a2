#include "btlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace btlab {

namespace {

// Thomas solve for a tridiagonal system with constant off-diagonals = 1 and
// per-row diagonal diag[i]; rhs overwritten with the solution.
void tridiag_unit_offdiag(std::vector<double>& diag, std::vector<double>& rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    const double w = 1.0 / diag[i - 1];
    diag[i] -= w;
    rhs[i] -= w * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    rhs[i] = (rhs[i] - rhs[i + 1]) / diag[i];
  }
}

}  // namespace

PeriodicSpline::PeriodicSpline(double x0, double dx, std::vector<double> values)
    : x0_(x0), dx_(dx), y_(std::move(values)) {
  const int n = static_cast<int>(y_.size());
  if (n < 3) throw std::invalid_argument("PeriodicSpline: need at least 3 knots");
  if (!(dx > 0.0)) throw std::invalid_argument("PeriodicSpline: dx must be positive");

  // Cyclic system M_{k-1} + 4 M_k + M_{k+1} = 6 (y_{k-1} - 2 y_k + y_{k+1}) / dx^2,
  // solved with the Sherman-Morrison corner trick (two Thomas passes).
  std::vector<double> rhs(n);
  for (int k = 0; k < n; ++k) {
    const double ym = y_[(k + n - 1) % n], yp = y_[(k + 1) % n];
    rhs[k] = 6.0 * (ym - 2.0 * y_[k] + yp) / (dx * dx);
  }
  const double gamma = -4.0;
  std::vector<double> diag(n, 4.0);
  diag[0] -= gamma;
  diag[n - 1] -= 1.0 / gamma;

  std::vector<double> d1 = diag, r1 = rhs;
  tridiag_unit_offdiag(d1, r1);

  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = 1.0;
  std::vector<double> d2 = diag;
  tridiag_unit_offdiag(d2, u);

  const double vy = r1[0] + r1[n - 1] / gamma;
  const double vz = u[0] + u[n - 1] / gamma;
  const double f = vy / (1.0 + vz);
  m_.resize(n);
  for (int k = 0; k < n; ++k) m_[k] = r1[k] - f * u[k];
}

double PeriodicSpline::operator()(double x) const {
  const int n = static_cast<int>(y_.size());
  double rel = (x - x0_) / dx_;
  rel -= n * std::floor(rel / n);
  int i = static_cast<int>(rel);
  if (i >= n) i = 0;
  const double t = rel - i;
  const int j = (i + 1) % n;
  const double a = 1.0 - t;
  return a * y_[i] + t * y_[j] +
         (dx_ * dx_ / 6.0) * (m_[i] * (a * a * a - a) + m_[j] * (t * t * t - t));
}

double PeriodicSpline::derivative(double x) const {
  const int n = static_cast<int>(y_.size());
  double rel = (x - x0_) / dx_;
  rel -= n * std::floor(rel / n);
  int i = static_cast<int>(rel);
  if (i >= n) i = 0;
  const double t = rel - i;
  const int j = (i + 1) % n;
  const double a = 1.0 - t;
  return (y_[j] - y_[i]) / dx_ +
         (dx_ / 6.0) * (m_[i] * (1.0 - 3.0 * a * a) + m_[j] * (3.0 * t * t - 1.0));
}

ParametricCurve ParametricCurve::shifted_disk(double radius, Vec2 center) {
  if (!(radius > 0.0)) throw std::invalid_argument("shifted_disk: radius must be positive");
  ParametricCurve c;
  c.kind_ = Kind::shifted_disk;
  c.a_ = c.b_ = radius;
  c.center_ = center;
  return c;
}

ParametricCurve ParametricCurve::ellipse(double a, double b, Vec2 center) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse: semi-axes must be positive");
  ParametricCurve c;
  c.kind_ = Kind::ellipse;
  c.a_ = a;
  c.b_ = b;
  c.center_ = center;
  return c;
}

ParametricCurve ParametricCurve::fourier_circle(double r0, std::vector<double> cos_coef,
                                                std::vector<double> sin_coef, Vec2 center) {
  if (!(r0 > 0.0)) throw std::invalid_argument("fourier_circle: r0 must be positive");
  ParametricCurve c;
  c.kind_ = Kind::fourier_circle;
  c.r0_ = r0;
  c.cos_coef_ = std::move(cos_coef);
  c.sin_coef_ = std::move(sin_coef);
  c.center_ = center;
  // Reject self-intersecting radius functions up front: r must stay positive.
  double worst = 1.0;
  for (double a : c.cos_coef_) worst -= std::abs(a);
  for (double b : c.sin_coef_) worst -= std::abs(b);
  if (worst <= 0.05) {
    throw std::invalid_argument("fourier_circle: perturbation too large, radius may vanish");
  }
  return c;
}

ParametricCurve ParametricCurve::from_samples(const std::vector<Vec2>& points) {
  const int n = static_cast<int>(points.size());
  if (n < 8) throw std::invalid_argument("from_samples: need at least 8 points");
  ParametricCurve c;
  c.kind_ = Kind::sampled;
  c.period_ = 2.0 * M_PI;
  const double dt = c.period_ / n;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = points[i].x;
    ys[i] = points[i].y;
  }
  c.sx_ = PeriodicSpline(0.0, dt, std::move(xs));
  c.sy_ = PeriodicSpline(0.0, dt, std::move(ys));
  c.n_samples_ = n;
  return c;
}

ParametricCurve ParametricCurve::reflected_x() const {
  const Vec2 rc{-center_.x, center_.y};
  switch (kind_) {
    case Kind::shifted_disk:
      return shifted_disk(a_, rc);
    case Kind::ellipse:
      return ellipse(a_, b_, rc);
    case Kind::fourier_circle: {
      // r(phi) -> r(pi - phi): cos k(pi-phi) = (-1)^k cos k phi,
      // sin k(pi-phi) = -(-1)^k sin k phi.
      std::vector<double> cc = cos_coef_, sc = sin_coef_;
      for (std::size_t k = 0; k < cc.size(); ++k)
        if (k % 2 == 0) cc[k] = -cc[k];  // k+1 odd
      for (std::size_t k = 0; k < sc.size(); ++k)
        if (k % 2 == 1) sc[k] = -sc[k];
      return fourier_circle(r0_, std::move(cc), std::move(sc), rc);
    }
    case Kind::sampled: {
      std::vector<Vec2> pts(n_samples_);
      const double dt = period_ / n_samples_;
      for (int i = 0; i < n_samples_; ++i) {
        const Vec2 p = position(i * dt);
        pts[i] = {-p.x, p.y};
      }
      return from_samples(pts);
    }
  }
  throw std::logic_error("reflected_x: unknown curve kind");
}

Vec2 ParametricCurve::position(double t) const {
  switch (kind_) {
    case Kind::shifted_disk:
      return {center_.x + a_ * std::cos(t), center_.y + a_ * std::sin(t)};
    case Kind::ellipse:
      return {center_.x + a_ * std::cos(t), center_.y + b_ * std::sin(t)};
    case Kind::fourier_circle: {
      double r = 1.0;
      for (size_t k = 0; k < cos_coef_.size(); ++k) r += cos_coef_[k] * std::cos((k + 1) * t);
      for (size_t k = 0; k < sin_coef_.size(); ++k) r += sin_coef_[k] * std::sin((k + 1) * t);
      r *= r0_;
      return {center_.x + r * std::cos(t), center_.y + r * std::sin(t)};
    }
    case Kind::sampled:
      return {sx_(t), sy_(t)};
  }
  return {};
}

Vec2 ParametricCurve::derivative(double t) const {
  switch (kind_) {
    case Kind::shifted_disk:
      return {-a_ * std::sin(t), a_ * std::cos(t)};
    case Kind::ellipse:
      return {-a_ * std::sin(t), b_ * std::cos(t)};
    case Kind::fourier_circle: {
      double r = 1.0, rp = 0.0;
      for (size_t k = 0; k < cos_coef_.size(); ++k) {
        r += cos_coef_[k] * std::cos((k + 1) * t);
        rp -= cos_coef_[k] * (k + 1) * std::sin((k + 1) * t);
      }
      for (size_t k = 0; k < sin_coef_.size(); ++k) {
        r += sin_coef_[k] * std::sin((k + 1) * t);
        rp += sin_coef_[k] * (k + 1) * std::cos((k + 1) * t);
      }
      r *= r0_;
      rp *= r0_;
      return {rp * std::cos(t) - r * std::sin(t), rp * std::sin(t) + r * std::cos(t)};
    }
    case Kind::sampled:
      return {sx_.derivative(t), sy_.derivative(t)};
  }
  return {};
}

Vec2 ParametricCurve::second_derivative(double t) const {
  switch (kind_) {
    case Kind::shifted_disk:
      return {-a_ * std::cos(t), -a_ * std::sin(t)};
    case Kind::ellipse:
      return {-a_ * std::cos(t), -b_ * std::sin(t)};
    default: {
      // Fourier radii and sampled splines: centered difference of the exact
      // first derivative; step tuned for ~1e-10 absolute error.
      const double e = 1e-5;
      const Vec2 dp = derivative(t + e), dm = derivative(t - e);
      return {(dp.x - dm.x) / (2.0 * e), (dp.y - dm.y) / (2.0 * e)};
    }
  }
}

namespace {

// Monotone cubic (Fritsch-Carlson) interpolant used to invert the cumulative
// arc length; x strictly increasing.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    d_.resize(n);
    std::vector<double> sec(n - 1);
    for (int i = 0; i + 1 < n; ++i) sec[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
    d_[0] = sec[0];
    d_[n - 1] = sec[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
      d_[i] = (sec[i - 1] * sec[i] <= 0.0) ? 0.0 : 0.5 * (sec[i - 1] + sec[i]);
    }
    for (int i = 0; i + 1 < n; ++i) {
      if (sec[i] == 0.0) {
        d_[i] = d_[i + 1] = 0.0;
        continue;
      }
      const double a = d_[i] / sec[i], b = d_[i + 1] / sec[i];
      const double s = a * a + b * b;
      if (s > 9.0) {
        const double tau = 3.0 / std::sqrt(s);
        d_[i] = tau * a * sec[i];
        d_[i + 1] = tau * b * sec[i];
      }
    }
  }

  double operator()(double xq) const {
    const int n = static_cast<int>(x_.size());
    if (xq <= x_.front()) return y_.front();
    if (xq >= x_.back()) return y_.back();
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
      const int mid = (lo + hi) / 2;
      (x_[mid] <= xq ? lo : hi) = mid;
    }
    const double hxi = x_[lo + 1] - x_[lo];
    const double t = (xq - x_[lo]) / hxi;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[lo] + h10 * hxi * d_[lo] + h01 * y_[lo + 1] + h11 * hxi * d_[lo + 1];
  }

 private:
  std::vector<double> x_, y_, d_;
};

// Proper segment-intersection test (shared endpoints excluded by the caller).
bool segments_cross(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
  auto orient = [](Vec2 a, Vec2 b, Vec2 c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  };
  const double o1 = orient(p1, p2, q1), o2 = orient(p1, p2, q2);
  const double o3 = orient(q1, q2, p1), o4 = orient(q1, q2, p2);
  return o1 * o2 < 0.0 && o3 * o4 < 0.0;
}

void check_simple(const ParametricCurve& curve) {
  const int m = 1024;
  std::vector<Vec2> p(m);
  for (int i = 0; i < m; ++i) p[i] = curve.position(curve.period() * i / m);
  for (int i = 0; i < m; ++i) {
    const Vec2 a1 = p[i], a2 = p[(i + 1) % m];
    for (int j = i + 2; j < m; ++j) {
      if (i == 0 && j == m - 1) continue;  // adjacent through the seam
      if (segments_cross(a1, a2, p[j], p[(j + 1) % m])) {
        throw std::invalid_argument("arclength_reparametrize: sampled curve is not simple");
      }
    }
  }
}

}  // namespace

CurveTable arclength_reparametrize(const ParametricCurve& curve, int n_nodes) {
  if (n_nodes < 64) throw std::invalid_argument("arclength_reparametrize: n_nodes < 64");
  if (curve.sampled()) check_simple(curve);

  const double period = curve.period();

  // Leftmost parameter: dense scan, then Newton on x'(t) with the analytic
  // second derivative (kept at the scan node when the minimum is flat).
  const int scan = 4096;
  double tstar = 0.0, xbest = curve.position(0.0).x;
  for (int i = 1; i < scan; ++i) {
    const double t = period * i / scan;
    const double x = curve.position(t).x;
    if (x < xbest) {
      xbest = x;
      tstar = t;
    }
  }
  for (int it = 0; it < 80; ++it) {
    const double xp = curve.derivative(tstar).x;
    const double xpp = curve.second_derivative(tstar).x;
    if (std::abs(xpp) < 1e-12) break;  // flat side, keep the scan node
    const double step = xp / xpp;
    tstar -= step;
    if (std::abs(step) < 1e-15 * period) break;
  }

  const Vec2 tan0 = curve.derivative(tstar);
  if (tan0.norm() < 1e-12) {
    throw std::invalid_argument("arclength_reparametrize: degenerate tangent at leftmost point");
  }
  // Normalize the traversal so s increases toward +y at A0.
  const double dir = (tan0.y >= 0.0) ? 1.0 : -1.0;
  const Vec2 a0 = curve.position(tstar);

  // Cumulative arc length along e(tau) = gamma(tstar + dir*tau), composite
  // Simpson with midpoints on a dense uniform tau grid.
  const int m = std::max(32768, 8 * n_nodes);
  std::vector<double> cum(m + 1), tau(m + 1);
  const double dtau = period / m;
  auto speed = [&](double tq) { return curve.derivative(tstar + dir * tq).norm(); };
  cum[0] = 0.0;
  tau[0] = 0.0;
  double vl = speed(0.0);
  for (int i = 0; i < m; ++i) {
    const double tmid = (i + 0.5) * dtau;
    const double vr = speed((i + 1.0) * dtau);
    cum[i + 1] = cum[i] + dtau / 6.0 * (vl + 4.0 * speed(tmid) + vr);
    tau[i + 1] = (i + 1.0) * dtau;
    vl = vr;
  }
  const double P = cum[m];
  const double L = 0.5 * P;
  MonotoneCubic tau_of_s(cum, tau);

  CurveTable tab;
  tab.L = L;
  tab.s.resize(n_nodes);
  tab.gamma.resize(n_nodes);
  tab.normal.resize(n_nodes);
  tab.kappa.resize(n_nodes);
  const double ds = 2.0 * L / n_nodes;
  double max_kappa = 0.0;
  for (int k = 0; k < n_nodes; ++k) {
    const double s = -L + k * ds;
    const double sigma = (s >= 0.0) ? s : s + P;  // cumulative coordinate from A0
    const double t = tstar + dir * tau_of_s(sigma);
    const Vec2 g = curve.position(t);
    const Vec2 d1 = dir * curve.derivative(t);
    const Vec2 d2 = curve.second_derivative(t);
    const double sp = d1.norm();
    const Vec2 tgt = (1.0 / sp) * d1;
    // Outward normal rot90(T): at A0 the tangent is (0,1), so rot90 gives
    // (-1,0), which points out of the domain at the leftmost point; the sign
    // then propagates around the curve by continuity.
    tab.s[k] = s;
    tab.gamma[k] = g - a0;
    tab.normal[k] = {-tgt.y, tgt.x};
    tab.kappa[k] = -(d1.x * d2.y - d1.y * d2.x) / (sp * sp * sp);
    max_kappa = std::max(max_kappa, std::abs(tab.kappa[k]));
  }
  tab.delta_max = 0.9 / max_kappa;

  std::vector<double> gx(n_nodes), gy(n_nodes), nx(n_nodes), ny(n_nodes);
  for (int k = 0; k < n_nodes; ++k) {
    gx[k] = tab.gamma[k].x;
    gy[k] = tab.gamma[k].y;
    nx[k] = tab.normal[k].x;
    ny[k] = tab.normal[k].y;
  }
  tab.sp_gx = PeriodicSpline(-L, ds, std::move(gx));
  tab.sp_gy = PeriodicSpline(-L, ds, std::move(gy));
  tab.sp_nx = PeriodicSpline(-L, ds, std::move(nx));
  tab.sp_ny = PeriodicSpline(-L, ds, std::move(ny));
  tab.sp_kappa = PeriodicSpline(-L, ds, tab.kappa);

  // Resampling accuracy: every node gap must carry exactly ds of arc length.
  // Differentiating the cubic inverse would limit the check to the
  // interpolant's derivative order, so instead re-integrate the speed across
  // each placed gap with fine Simpson and compare against ds directly: that
  // is the property the spline tables assume.
  double werr = 0.0;
  for (int k = 0; k < n_nodes; ++k) {
    const double s = tab.s[k];
    const double sigma = (s >= 0.0) ? s : s + P;
    const double ta = tau_of_s(sigma);
    const double tb = tau_of_s(std::min(sigma + ds, P));
    double acc = 0.0;
    const double hq = (tb - ta) / 4.0;
    for (int q = 0; q < 4; ++q) {
      const double l = ta + q * hq;
      acc += hq / 6.0 * (speed(l) + 4.0 * speed(l + 0.5 * hq) + speed(l + hq));
    }
    werr = std::max(werr, std::abs(acc - ds) / ds);
  }
  tab.speed_err = werr;
  if (werr > 1e-8) {
    char msg[96];
    std::snprintf(msg, sizeof msg,
                  "arclength_reparametrize: node gap arc length off by %.3e relative", werr);
    throw std::runtime_error(msg);
  }
  return tab;
}

double CurveTable::wrap(double sq) const {
  const double P = 2.0 * L;
  double r = sq - P * std::floor((sq + L) / P);
  if (r >= L) r -= P;   // guard the floor rounding at the seam
  if (r < -L) r += P;
  return r;
}

Vec2 CurveTable::gamma_at(double sq) const { return {sp_gx(sq), sp_gy(sq)}; }
Vec2 CurveTable::normal_at(double sq) const { return {sp_nx(sq), sp_ny(sq)}; }
double CurveTable::kappa_at(double sq) const { return sp_kappa(sq); }

namespace {

double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol) {
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

ExtremalReport locate_extremal_points(const CurveTable& table) {
  const int n = static_cast<int>(table.s.size());
  const double ds = 2.0 * table.L / n;

  int imin = 0, imax = 0;
  for (int k = 1; k < n; ++k) {
    if (table.gamma[k].x < table.gamma[imin].x) imin = k;
    if (table.gamma[k].x > table.gamma[imax].x) imax = k;
  }

  ExtremalReport rep;
  auto g1 = [&](double s) { return table.gamma_at(s).x; };
  rep.s_min = table.wrap(golden_min(g1, table.s[imin] - ds, table.s[imin] + ds, 1e-10));
  rep.s_max = table.wrap(golden_min([&](double s) { return -g1(s); }, table.s[imax] - ds,
                                    table.s[imax] + ds, 1e-10));
  rep.a0 = table.gamma_at(rep.s_min);
  rep.a1 = table.gamma_at(rep.s_max);
  rep.x1_min = rep.a0.x;
  rep.x1_max = rep.a1.x;
  rep.kappa0 = table.kappa_at(rep.s_min);
  rep.kappa1 = table.kappa_at(rep.s_max);

  // Uniqueness: cluster the near-extremal local-extremum nodes by adjacency;
  // a clean nondegenerate extremum yields one short cluster, a flat side or a
  // second competing extremum yields extra clusters or a wide one.
  const double range = rep.x1_max - rep.x1_min;
  const double tol = 1e-6 * range;
  double max_abs_kappa = 0.0;
  for (double k : table.kappa) max_abs_kappa = std::max(max_abs_kappa, std::abs(k));

  auto uniqueness = [&](bool for_min) {
    std::vector<int> hits;
    for (int k = 0; k < n; ++k) {
      const double v0 = table.gamma[k].x;
      const double vp = table.gamma[(k + 1) % n].x;
      const double vm = table.gamma[(k + n - 1) % n].x;
      const bool local = for_min ? (v0 <= vp && v0 <= vm) : (v0 >= vp && v0 >= vm);
      const bool close = for_min ? (v0 <= rep.x1_min + tol) : (v0 >= rep.x1_max - tol);
      if (local && close) hits.push_back(k);
    }
    if (hits.empty()) return false;
    int clusters = 1, width = 1, max_width = 1;
    for (size_t i = 1; i < hits.size(); ++i) {
      if (hits[i] - hits[i - 1] <= 2) {
        ++width;
      } else {
        ++clusters;
        max_width = std::max(max_width, width);
        width = 1;
      }
    }
    max_width = std::max(max_width, width);
    if (clusters > 1 && hits.front() <= 1 && hits.back() >= n - 2) --clusters;  // seam wrap
    return clusters == 1 && max_width <= 6;
  };
  rep.unique_min = uniqueness(true);
  rep.unique_max = uniqueness(false);
  rep.nondegenerate_min = rep.kappa0 > 1e-4 * max_abs_kappa;
  rep.nondegenerate_max = rep.kappa1 > 1e-4 * max_abs_kappa;
  rep.assumption_min = rep.unique_min && rep.nondegenerate_min;
  rep.assumption_max = rep.unique_max && rep.nondegenerate_max;
  return rep;
}

Vec2 tubular_map(const CurveTable& table, double s, double t) {
  if (!(std::abs(t) < table.delta_max)) {
    throw std::invalid_argument("tubular_map: |t| must stay below delta_max");
  }
  return table.gamma_at(s) - t * table.normal_at(s);
}

} // namespace btlab
