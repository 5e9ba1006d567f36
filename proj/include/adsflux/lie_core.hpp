#pragma once

// 2x2 realizations of sl(2,R), PSL(2,R) and the upper half-plane.
// Metric on sl(2,R): (1/8) Killing = (1/2) tr(XY), signature (2,1).

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "adsflux/errors.hpp"

namespace adsflux {

using Mat2 = Eigen::Matrix2d;
using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;

struct AlgVec {
  Mat2 m = Mat2::Zero();

  AlgVec() = default;
  explicit AlgVec(const Mat2& mat) : m(mat) {}

  // coordinates in the basis (J, K, K')
  static AlgVec from_coords(double a, double b, double c) {
    Mat2 r;
    r << b, a + c, c - a, -b;
    return AlgVec(r);
  }
  Vec3 coords() const {
    return Vec3(0.5 * (m(0, 1) - m(1, 0)), m(0, 0), 0.5 * (m(0, 1) + m(1, 0)));
  }

  AlgVec operator+(const AlgVec& o) const { return AlgVec(m + o.m); }
  AlgVec operator-(const AlgVec& o) const { return AlgVec(m - o.m); }
  AlgVec operator-() const { return AlgVec(-m); }
  AlgVec operator*(double s) const { return AlgVec(m * s); }
  AlgVec operator/(double s) const { return AlgVec(m / s); }
  AlgVec& operator+=(const AlgVec& o) { m += o.m; return *this; }
};

inline AlgVec operator*(double s, const AlgVec& x) { return x * s; }

inline AlgVec basis_J() { return AlgVec::from_coords(1, 0, 0); }
inline AlgVec basis_K() { return AlgVec::from_coords(0, 1, 0); }
inline AlgVec basis_Kp() { return AlgVec::from_coords(0, 0, 1); }

inline double pairing(const AlgVec& x, const AlgVec& y) { return 0.5 * (x.m * y.m).trace(); }

inline AlgVec cross(const AlgVec& x, const AlgVec& y) {
  return AlgVec(0.5 * (x.m * y.m - y.m * x.m));
}

// drop the trace part (finite differences leave a little)
inline AlgVec traceless(const Mat2& m) {
  Mat2 r = m;
  double h = 0.5 * m.trace();
  r(0, 0) -= h;
  r(1, 1) -= h;
  return AlgVec(r);
}

inline bool is_future(const AlgVec& x) { return pairing(x, basis_J()) < 0; }

// representative of -M/+M closest to ref
inline Mat2 align_sign(const Mat2& m, const Mat2& ref) {
  return (m - ref).squaredNorm() <= (m + ref).squaredNorm() ? m : Mat2(-m);
}

class GroupElt {
 public:
  GroupElt() : m_(Mat2::Identity()) {}
  explicit GroupElt(const Mat2& m) : m_(normalize(m)) {}

  static GroupElt identity() { return GroupElt(); }

  const Mat2& matrix() const { return m_; }
  double det() const { return m_.determinant(); }

  GroupElt operator*(const GroupElt& o) const { return GroupElt(m_ * o.m_); }
  GroupElt inverse() const {
    Mat2 r;
    r << m_(1, 1), -m_(0, 1), -m_(1, 0), m_(0, 0);
    return GroupElt(r);
  }

 private:
  static Mat2 normalize(const Mat2& m) {
    double lead = std::abs(m(0, 0)) > 1e-14 * (1.0 + m.norm()) ? m(0, 0) : m(1, 0);
    return lead < 0 ? Mat2(-m) : m;
  }
  Mat2 m_;
};

inline Mat2 sl2_inverse(const Mat2& m) {
  Mat2 r;
  r << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
  return r;
}

// Frobenius distance in PSL(2,R)
inline double psl_distance(const Mat2& a, const Mat2& b) {
  return std::min((a - b).norm(), (a + b).norm());
}
inline double psl_distance(const GroupElt& a, const GroupElt& b) {
  return psl_distance(a.matrix(), b.matrix());
}

// exp(tX) in SL(2,R). X^2 = delta*I with delta = -det X.
inline Mat2 exp_matrix(const AlgVec& x, double t) {
  double delta = -x.m.determinant();
  Mat2 id = Mat2::Identity();
  if (delta < 0) {
    double w = std::sqrt(-delta);
    return std::cos(t * w) * id + (std::sin(t * w) / w) * x.m;
  }
  if (delta > 0) {
    double w = std::sqrt(delta);
    return std::cosh(t * w) * id + (std::sinh(t * w) / w) * x.m;
  }
  return id + t * x.m;
}

inline GroupElt exp_alg(const AlgVec& x, double t) { return GroupElt(exp_matrix(x, t)); }

struct HPoint {
  double x = 0;
  double y = 1;

  cplx z() const { return {x, y}; }
  static HPoint from(cplx z) { return {z.real(), z.imag()}; }
};

inline double cosh_distance(const HPoint& p, const HPoint& q) {
  double dx = p.x - q.x, dy = p.y - q.y;
  return 1.0 + (dx * dx + dy * dy) / (2.0 * p.y * q.y);
}

inline double hyp_distance(const HPoint& p, const HPoint& q) {
  // acosh loses digits near 1; use asinh of the half-chord instead
  double dx = p.x - q.x, dy = p.y - q.y;
  double s = std::sqrt((dx * dx + dy * dy) / (4.0 * p.y * q.y));
  return 2.0 * std::asinh(s);
}

// f(a+bi) = (1/b) [[-a, a^2+b^2], [-1, a]]
inline AlgVec f_embed(const HPoint& p) {
  Mat2 r;
  r << -p.x, p.x * p.x + p.y * p.y, -1.0, p.x;
  return AlgVec(r / p.y);
}

// partial derivatives of f in x and y
inline std::array<AlgVec, 2> f_embed_d(const HPoint& p) {
  double a = p.x, b = p.y;
  Mat2 dx, dy;
  dx << -1.0, 2.0 * a, 0.0, 1.0;
  dy << a, b * b - a * a, 1.0, -a;
  return {AlgVec(dx / b), AlgVec(dy / (b * b))};
}

inline HPoint f_invert(const AlgVec& x, double tol = 1e-9) {
  double n = pairing(x, x);
  if (std::abs(n + 1.0) > tol)
    throw GeometryError(ErrorKind::not_unit_timelike, "pairing(X,X) = " + std::to_string(n));
  double r = x.m(1, 0);
  if (r >= 0) throw GeometryError(ErrorKind::past_directed, "lower-left entry " + std::to_string(r));
  return {x.m(0, 0) / r, -1.0 / r};
}

inline cplx mobius(const Mat2& g, cplx z) {
  return (g(0, 0) * z + g(0, 1)) / (g(1, 0) * z + g(1, 1));
}
inline HPoint mobius(const Mat2& g, const HPoint& p) { return HPoint::from(mobius(g, p.z())); }
inline HPoint mobius(const GroupElt& g, const HPoint& p) { return mobius(g.matrix(), p); }

// complex derivative of z -> g.z
inline cplx mobius_derivative(const Mat2& g, cplx z) {
  cplx d = g(1, 0) * z + g(1, 1);
  return 1.0 / (d * d);
}

// rotation by angle phi (counterclockwise) about i
inline Mat2 rotation_about_i(double phi) {
  Mat2 r;
  r << std::cos(phi / 2), std::sin(phi / 2), -std::sin(phi / 2), std::cos(phi / 2);
  return r;
}

// translation by s along the imaginary axis, i -> e^s i
inline Mat2 boost(double s) {
  Mat2 r;
  r << std::exp(s / 2), 0.0, 0.0, std::exp(-s / 2);
  return r;
}

// Hyperbolic translation taking src to dst along their geodesic.
// f(p) is the half-turn about p, so -f(dst) f(src) translates by 2d and
// its positive-trace square root is (I - f(dst) f(src)) / (2 cosh(d/2)).
inline Mat2 translation_matrix(const HPoint& src, const HPoint& dst) {
  Mat2 p = -(f_embed(dst).m * f_embed(src).m);
  double tr = p.trace();
  return (p + Mat2::Identity()) / std::sqrt(tr + 2.0);
}

inline GroupElt translation_along(const HPoint& src, const HPoint& dst) {
  return GroupElt(translation_matrix(src, dst));
}

// unit spacelike axis Y with -f(q) f(p) = cosh d I + sinh d Y; returns d
inline double geodesic_axis(const HPoint& p, const HPoint& q, Mat2& y) {
  double d = hyp_distance(p, q);
  if (d == 0.0) {
    y.setZero();
    return 0.0;
  }
  y = traceless(-(f_embed(q).m * f_embed(p).m)).m / std::sinh(d);
  return d;
}

// point at fraction lam along the geodesic from p to q
inline HPoint geodesic_point(const HPoint& p, const HPoint& q, double lam) {
  Mat2 y;
  double d = geodesic_axis(p, q, y);
  if (d == 0.0) return p;
  Mat2 t = std::cosh(lam * d / 2) * Mat2::Identity() + std::sinh(lam * d / 2) * y;
  return mobius(t, p);
}

// d/dlam of geodesic_point, as (dx, dy)
inline Eigen::Vector2d geodesic_velocity(const HPoint& p, const HPoint& q, double lam) {
  Mat2 y;
  double d = geodesic_axis(p, q, y);
  if (d == 0.0) return Eigen::Vector2d::Zero();
  Mat2 t = std::cosh(lam * d / 2) * Mat2::Identity() + std::sinh(lam * d / 2) * y;
  Mat2 dt = (d / 2) * (std::sinh(lam * d / 2) * Mat2::Identity() + std::cosh(lam * d / 2) * y);
  cplx z = p.z();
  cplx num = t(0, 0) * z + t(0, 1), den = t(1, 0) * z + t(1, 1);
  cplx dnum = dt(0, 0) * z + dt(0, 1), dden = dt(1, 0) * z + dt(1, 1);
  cplx w = (dnum * den - num * dden) / (den * den);
  return {w.real(), w.imag()};
}

struct IsomPair {
  GroupElt left;
  GroupElt right;

  static IsomPair identity() { return {}; }
  IsomPair operator*(const IsomPair& o) const { return {left * o.left, right * o.right}; }
  IsomPair inverse() const { return {left.inverse(), right.inverse()}; }
};

// action on AdS^3: gamma -> left * gamma * right^-1
inline Mat2 act_on_group(const IsomPair& a, const Mat2& g) {
  return a.left.matrix() * g * sl2_inverse(a.right.matrix());
}

}  // namespace adsflux
