#pragma once

// Future unit timelike tangent bundle of AdS^3 in body-frame coordinates.
// A frame (g, u0) has world velocity g*u0; the flow is right multiplication
// by exp(t u0) and the fibre over (x, y) is the timelike geodesic L_{x,y}.

#include <Eigen/Dense>

#include <array>
#include <functional>

#include "adsflux/lie_core.hpp"

namespace adsflux {

using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;

struct BiPoint {
  HPoint left;
  HPoint right;

  Vec4 vec() const { return {left.x, left.y, right.x, right.y}; }
  static BiPoint from(const Vec4& v) { return {{v[0], v[1]}, {v[2], v[3]}}; }
};

inline BiPoint act(const IsomPair& a, const BiPoint& b) {
  return {mobius(a.left, b.left), mobius(a.right, b.right)};
}

// largest factor-wise hyperbolic distance
inline double bi_distance(const BiPoint& a, const BiPoint& b) {
  return std::max(hyp_distance(a.left, b.left), hyp_distance(a.right, b.right));
}

struct FramePoint {
  GroupElt g;
  AlgVec u0;
};

struct FrameTangent {
  AlgVec w;  // horizontal, body frame
  AlgVec v;  // vertical, body frame
};

// body velocity of a frame path: w = g^-1 g', plus du0/ds
struct FrameVelocity {
  AlgVec w;
  AlgVec du0;
};

inline FramePoint geodesic_flow(const FramePoint& f, double t) {
  return {GroupElt(f.g.matrix() * exp_matrix(f.u0, t)), f.u0};
}

// left = f^-1(g u0 g^-1) = g . f^-1(u0); the Mobius form avoids conjugating
// by large matrices
inline BiPoint project(const FramePoint& f) {
  HPoint right = f_invert(f.u0);
  return {mobius(f.g, right), right};
}

inline FramePoint act(const IsomPair& a, const FramePoint& f) {
  const Mat2& b = a.right.matrix();
  return {GroupElt(act_on_group(a, f.g.matrix())), AlgVec(b * f.u0.m * sl2_inverse(b))};
}

inline double sasaki_pairing(const FramePoint&, const FrameTangent& t1, const FrameTangent& t2) {
  return pairing(t1.w, t2.w) + pairing(t1.v, t2.v);
}

// covariant derivative of u along the path, in body frame: u0' + (1/2)[w, u0]
inline FrameTangent to_tangent(const FramePoint& f, const FrameVelocity& vel) {
  return {vel.w, vel.du0 + cross(vel.w, f.u0)};
}

struct FramePath {
  std::function<FramePoint(double)> at;
  std::function<FrameVelocity(double)> velocity;  // optional
};

struct DiffOptions {
  double step = 1e-5;
  bool check = true;
  double gate = 1e-6;
};

namespace detail {

inline FrameVelocity fd_velocity(const FramePath& path, double s, double h) {
  FramePoint c = path.at(s), p = path.at(s + h), m = path.at(s - h);
  const Mat2& g = c.g.matrix();
  Mat2 gp = align_sign(p.g.matrix(), g), gm = align_sign(m.g.matrix(), g);
  AlgVec w = traceless(sl2_inverse(g) * (gp - gm) / (2 * h));
  AlgVec du(Mat2((p.u0.m - m.u0.m) / (2 * h)));
  return {w, du};
}

}  // namespace detail

inline FrameVelocity frame_velocity(const FramePath& path, double s, const DiffOptions& opt = {}) {
  if (path.velocity) return path.velocity(s);
  FrameVelocity a = detail::fd_velocity(path, s, opt.step);
  if (!opt.check) return a;
  FrameVelocity b = detail::fd_velocity(path, s, opt.step / 2);
  double diff = (a.w.m - b.w.m).norm() + (a.du0.m - b.du0.m).norm();
  double scale = 1.0 + b.w.m.norm() + b.du0.m.norm();
  if (diff > opt.gate * scale)
    throw GeometryError(ErrorKind::non_differentiable,
                        "difference quotients disagree by " + std::to_string(diff));
  // Richardson on the two central differences
  return {AlgVec((4.0 * b.w.m - a.w.m) / 3.0), AlgVec((4.0 * b.du0.m - a.du0.m) / 3.0)};
}

inline FrameTangent frame_tangent(const FramePath& path, double s, const DiffOptions& opt = {}) {
  return to_tangent(path.at(s), frame_velocity(path, s, opt));
}

// omega = -g_S(chi, .) evaluated on d/ds: -pairing(u0, g^-1 g')
inline double connection_along(const FramePath& path, double s, const DiffOptions& opt = {}) {
  FramePoint f = path.at(s);
  return -pairing(f.u0, frame_velocity(path, s, opt).w);
}

inline FramePoint canonical_section(const BiPoint& b) {
  return {translation_along(b.right, b.left), f_embed(b.right)};
}

enum class Side { left, right };

inline FramePoint foliation_section(Side side, const AlgVec& u, const GroupElt& g) {
  if (side == Side::left) return {g, u};
  const Mat2& m = g.matrix();
  return {g, AlgVec(sl2_inverse(m) * u.m * m)};
}

inline Vec6 tangent_coords(const FrameTangent& t) {
  Vec6 r;
  r << t.w.coords(), t.v.coords();
  return r;
}

// finite-difference tangents of the left/right section through f along g exp(s e_k)
inline std::array<Vec6, 3> foliation_tangents(Side side, const FramePoint& f, double h = 1e-5) {
  const AlgVec basis[3] = {basis_J(), basis_K(), basis_Kp()};
  const Mat2& g = f.g.matrix();
  AlgVec u = side == Side::left ? f.u0 : AlgVec(g * f.u0.m * sl2_inverse(g));
  std::array<Vec6, 3> out;
  for (int k = 0; k < 3; ++k) {
    FramePath path{[&, k](double s) {
                     return foliation_section(side, u, GroupElt(g * exp_matrix(basis[k], s)));
                   },
                   {}};
    out[k] = tangent_coords(frame_tangent(path, 0.0, {h, false, 0.0}));
  }
  return out;
}

}  // namespace adsflux
