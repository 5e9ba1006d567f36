#pragma once

// Parallel transport in the principal R-bundle over H^2 x H^2, trivialized by
// the canonical section. A parallel lift written as flow time t(s) against the
// canonical section obeys t' = -alpha(b'), alpha = pullback of the connection.

#include <cmath>
#include <functional>
#include <vector>

#include "adsflux/adsgeom.hpp"
#include "adsflux/quadrature.hpp"

namespace adsflux {

// Sigma_can^* omega at b applied to the base velocity v = (dx_l, dy_l, dx_r, dy_r).
// With F = f(left), G = f(right): T = (I - FG)/N, T^-1 = (I - GF)/N, N^2 = 2 - tr(FG);
// the dN term pairs with G to zero.
inline double canonical_form(const BiPoint& b, const Vec4& v) {
  const Mat2 F = f_embed(b.left).m, G = f_embed(b.right).m;
  auto dl = f_embed_d(b.left), dr = f_embed_d(b.right);
  Mat2 dF = v[0] * dl[0].m + v[1] * dl[1].m;
  Mat2 dG = v[2] * dr[0].m + v[3] * dr[1].m;
  double n2 = 2.0 - (F * G).trace();
  Mat2 tinv_dt = (Mat2::Identity() - G * F) * (dF * G + F * dG);
  return 0.5 * (G * tinv_dt).trace() / n2;
}

struct PathSegment {
  std::function<BiPoint(double)> at;  // s in [0,1]
  std::function<Vec4(double)> velocity;  // optional; finite differences otherwise
};

inline Vec4 segment_velocity(const PathSegment& seg, double s) {
  if (seg.velocity) return seg.velocity(s);
  const double h = 1e-6;
  // second-order one-sided at the ends so the segment is never sampled outside [0,1]
  if (s < h) return (-3.0 * seg.at(s).vec() + 4.0 * seg.at(s + h).vec() - seg.at(s + 2 * h).vec()) / (2 * h);
  if (s > 1 - h)
    return (3.0 * seg.at(s).vec() - 4.0 * seg.at(s - h).vec() + seg.at(s - 2 * h).vec()) / (2 * h);
  return (seg.at(s + h).vec() - seg.at(s - h).vec()) / (2 * h);
}

inline PathSegment geodesic_segment(const BiPoint& a, const BiPoint& b) {
  return {[=](double s) {
            return BiPoint{geodesic_point(a.left, b.left, s), geodesic_point(a.right, b.right, s)};
          },
          [=](double s) {
            Eigen::Vector2d l = geodesic_velocity(a.left, b.left, s);
            Eigen::Vector2d r = geodesic_velocity(a.right, b.right, s);
            return Vec4(l[0], l[1], r[0], r[1]);
          }};
}

// straight in half-plane coordinates
inline PathSegment straight_segment(const BiPoint& a, const BiPoint& b) {
  Vec4 p = a.vec(), d = b.vec() - a.vec();
  return {[=](double s) { return BiPoint::from(p + s * d); }, [=](double) { return d; }};
}

class BasePath {
 public:
  std::vector<PathSegment> segments;

  BasePath() = default;
  explicit BasePath(std::vector<PathSegment> segs) : segments(std::move(segs)) {}

  static BasePath constant(const BiPoint& b) {
    return BasePath({{[=](double) { return b; }, [](double) { return Vec4::Zero().eval(); }}});
  }

  static BasePath geodesic(const BiPoint& a, const BiPoint& b) { return BasePath({geodesic_segment(a, b)}); }

  // piecewise geodesic through the samples; consecutive samples must lie
  // within step_bound of each other in each factor
  static BasePath from_samples(const std::vector<BiPoint>& pts, double step_bound = 0.05) {
    BasePath p;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      double d = bi_distance(pts[i], pts[i + 1]);
      if (d > step_bound)
        throw GeometryError(ErrorKind::step_bound, "sample step " + std::to_string(d) + " at index " +
                                                       std::to_string(i));
      p.segments.push_back(geodesic_segment(pts[i], pts[i + 1]));
    }
    if (p.segments.empty() && !pts.empty()) return constant(pts.front());
    return p;
  }

  static BasePath from_function(std::function<BiPoint(double)> at, std::function<Vec4(double)> vel = {}) {
    return BasePath({{std::move(at), std::move(vel)}});
  }

  BiPoint start() const { return segments.front().at(0.0); }
  BiPoint end() const { return segments.back().at(1.0); }

  BasePath reversed() const {
    BasePath r;
    for (auto it = segments.rbegin(); it != segments.rend(); ++it) {
      PathSegment s = *it;
      PathSegment t;
      t.at = [s](double u) { return s.at(1.0 - u); };
      if (s.velocity) t.velocity = [s](double u) { return (-s.velocity(1.0 - u)).eval(); };
      r.segments.push_back(std::move(t));
    }
    return r;
  }

  BasePath then(const BasePath& other) const {
    BasePath r = *this;
    r.segments.insert(r.segments.end(), other.segments.begin(), other.segments.end());
    return r;
  }
};

struct TransportOptions {
  QuadOptions quad{1e-8, 1e-12, 16, 1 << 16, pi / 2};
};

struct TransportResult {
  double offset = 0;
  double error = 0;
  bool converged = true;
};

inline TransportResult transport_detail(const BasePath& path, const TransportOptions& opt = {}) {
  TransportResult r;
  for (const auto& seg : path.segments) {
    auto q = simpson([&](double s) { return canonical_form(seg.at(s), segment_velocity(seg, s)); }, 0.0, 1.0,
                     opt.quad);
    r.offset -= q.value;
    r.error += q.error;
    r.converged = r.converged && q.converged;
  }
  return r;
}

// -integral of Sigma_can^* omega: fibre time of the parallel lift relative to
// the canonical section
inline double transport_offset(const BasePath& path, const TransportOptions& opt = {}) {
  TransportResult r = transport_detail(path, opt);
  if (!r.converged)
    throw GeometryError(ErrorKind::quadrature, "transport quadrature did not converge");
  return r.offset;
}

// same integral against an arbitrary section, through connection_along
inline double transport_offset_with(const BasePath& path, const std::function<FramePoint(const BiPoint&)>& section,
                                    const TransportOptions& opt = {}) {
  double total = 0;
  for (const auto& seg : path.segments) {
    FramePath fp{[&](double s) { return section(seg.at(s)); }, {}};
    auto q = simpson([&](double s) { return connection_along(fp, s, {1e-5, false, 0.0}); }, 0.0, 1.0, opt.quad);
    if (!q.converged) throw GeometryError(ErrorKind::quadrature, "transport quadrature did not converge");
    total -= q.value;
  }
  return total;
}

inline void check_closed(const BasePath& loop, double tol = 1e-12) {
  double gap = (loop.start().vec() - loop.end().vec()).cwiseAbs().maxCoeff();
  if (gap > tol) throw GeometryError(ErrorKind::endpoint_mismatch, "loop endpoints differ by " + std::to_string(gap));
}

inline double loop_defect(const BasePath& loop, const TransportOptions& opt = {}) {
  check_closed(loop);
  return transport_offset(loop, opt);
}

struct FiberCoord {
  BiPoint base;
  double t = 0;

  FramePoint frame() const { return geodesic_flow(canonical_section(base), t); }
};

inline FiberCoord transport(const FiberCoord& start, const BasePath& path, const TransportOptions& opt = {}) {
  return {path.end(), start.t + transport_offset(path, opt)};
}

// ---- symplectic area

struct DiskMap {
  std::function<BiPoint(double, double)> at;  // [0,1]^2
  std::function<std::array<Vec4, 2>(double, double)> partials;  // optional
};

inline std::array<Vec4, 2> disk_partials(const DiskMap& d, double u, double v) {
  if (d.partials) return d.partials(u, v);
  const double h = 1e-6;
  return {(d.at(u + h, v).vec() - d.at(u - h, v).vec()) / (2 * h),
          (d.at(u, v + h).vec() - d.at(u, v - h).vec()) / (2 * h)};
}

// Omega_rho = dx dy / y^2 on the left factor minus the same on the right
inline double omega_rho(const BiPoint& b, const Vec4& a, const Vec4& c) {
  double yl = b.left.y, yr = b.right.y;
  return (a[0] * c[1] - a[1] * c[0]) / (yl * yl) - (a[2] * c[3] - a[3] * c[2]) / (yr * yr);
}

inline double symplectic_area(const DiskMap& disk, double rel = 1e-12, double abs = 1e-15) {
  static const auto gl = gauss_legendre(8);
  auto integrate = [&](int k) {
    double sum = 0, h = 1.0 / k;
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        for (int a = 0; a < 8; ++a)
          for (int b = 0; b < 8; ++b) {
            double u = (i + 0.5 * (1 + gl.first[a])) * h, v = (j + 0.5 * (1 + gl.first[b])) * h;
            auto p = disk_partials(disk, u, v);
            sum += gl.second[a] * gl.second[b] * omega_rho(disk.at(u, v), p[0], p[1]);
          }
    return sum * h * h / 4;
  };
  double prev = integrate(1);
  for (int k = 2; k <= 64; k *= 2) {
    double cur = integrate(k);
    if (std::abs(cur - prev) <= std::max(abs, rel * std::abs(cur))) return cur;
    prev = cur;
  }
  return prev;
}

// boundary (0,0)->(1,0)->(1,1)->(0,1)->(0,0), counterclockwise in (u,v)
inline BasePath disk_boundary(const DiskMap& d) {
  auto edge = [&](std::function<std::pair<double, double>(double)> uv, int which, double sign) {
    PathSegment seg;
    seg.at = [d, uv](double s) {
      auto [u, v] = uv(s);
      return d.at(u, v);
    };
    if (d.partials)
      seg.velocity = [d, uv, which, sign](double s) {
        auto [u, v] = uv(s);
        return (sign * d.partials(u, v)[which]).eval();
      };
    return seg;
  };
  return BasePath({edge([](double s) { return std::pair{s, 0.0}; }, 0, 1.0),
                   edge([](double s) { return std::pair{1.0, s}; }, 1, 1.0),
                   edge([](double s) { return std::pair{1.0 - s, 1.0}; }, 0, -1.0),
                   edge([](double s) { return std::pair{0.0, 1.0 - s}; }, 1, -1.0)});
}

// coordinate-linear square: corner + u e1 + v e2
inline DiskMap coordinate_square(const BiPoint& corner, const Vec4& e1, const Vec4& e2) {
  Vec4 c = corner.vec();
  return {[=](double u, double v) { return BiPoint::from(c + u * e1 + v * e2); },
          [=](double, double) { return std::array<Vec4, 2>{e1, e2}; }};
}

// ---- fibre gaps

inline double reduce_mod_pi(double t) {
  t = std::remainder(t, pi);
  if (t <= -pi / 2) t += pi;
  return t;
}

// flow time from F1 to F2 on a shared fibre, defined mod pi; principal value in (-pi/2, pi/2]
inline double fiber_gap(const FramePoint& f1, const FramePoint& f2, double tol = 1e-9) {
  double d = bi_distance(project(f1), project(f2));
  if (d > tol) throw GeometryError(ErrorKind::not_common_fiber, "base points differ by " + std::to_string(d));
  Mat2 m = sl2_inverse(f1.g.matrix()) * f2.g.matrix();
  double c = 0.5 * m.trace();
  double s = -0.5 * (f1.u0.m * m).trace();
  return reduce_mod_pi(std::atan2(s, c));
}

// Lift of a mod-pi quantity along s in [0,1], starting from lift0 near value(0).
// Intervals are bisected until consecutive lifts move by less than pi/4.
inline double track_mod_pi(const std::function<double(double)>& value, double lift0, int n0 = 32,
                           int max_depth = 24) {
  std::function<double(double, double, double, int)> step = [&](double a, double la, double b, int depth) {
    double vb = value(b);
    double lb = vb + pi * std::round((la - vb) / pi);
    if (std::abs(lb - la) <= pi / 4) return lb;
    if (depth >= max_depth)
      throw GeometryError(ErrorKind::homotopy_too_coarse,
                          "mod-pi value jumps by " + std::to_string(std::abs(lb - la)) + " near s=" +
                              std::to_string(a));
    double m = 0.5 * (a + b);
    double lm = step(a, la, m, depth + 1);
    return step(m, lm, b, depth + 1);
  };
  double v0 = value(0.0);
  double l = v0 + pi * std::round((lift0 - v0) / pi);
  for (int i = 0; i < n0; ++i) l = step(double(i) / n0, l, double(i + 1) / n0, 0);
  return l;
}

using FrameHomotopy = std::function<std::pair<FramePoint, FramePoint>(double)>;

// gap resolved in R: starts from the principal value at s=0 and follows the
// family continuously; the family must end at (F1, F2)
inline double fiber_gap(const FramePoint& f1, const FramePoint& f2, const FrameHomotopy& h, double tol = 1e-9) {
  auto end = h(1.0);
  if (psl_distance(end.first.g, f1.g) > tol || psl_distance(end.second.g, f2.g) > tol)
    throw GeometryError(ErrorKind::endpoint_mismatch, "homotopy does not end at the given frames");
  auto value = [&](double s) {
    auto p = h(s);
    return fiber_gap(p.first, p.second, tol);
  };
  double lift = track_mod_pi(value, value(0.0));
  // land exactly on the downstairs value at the end
  double v1 = fiber_gap(f1, f2, tol);
  return v1 + pi * std::round((lift - v1) / pi);
}

}  // namespace adsflux
