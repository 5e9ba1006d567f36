#pragma once

// Equivariant maps into H^2 x H^2, spacelike surfaces in AdS^3, their normal
// lifts and Gauss maps, plus group-invariant bump functions on H^2.

#include <Eigen/Eigenvalues>

#include "adsflux/fuchsian.hpp"

namespace adsflux {

struct EquivMap {
  std::function<BiPoint(const HPoint&)> eval;
  std::function<std::array<Vec4, 2>(const HPoint&)> jacobian;  // optional (d/dx, d/dy)
};

// five-point stencil; evaluations of composite maps carry ~1e-12 noise, so the step stays coarse
inline std::array<Vec4, 2> map_partials(const EquivMap& m, const HPoint& p, double h = 1e-4) {
  if (m.jacobian) return m.jacobian(p);
  double e = h * p.y;  // scale with the local metric
  auto d = [&](double dx, double dy) {
    auto at = [&](double k) { return m.eval({p.x + k * dx, p.y + k * dy}).vec(); };
    return Vec4((8.0 * (at(e) - at(-e)) - (at(2 * e) - at(-2 * e))) / (12 * e));
  };
  return {d(1, 0), d(0, 1)};
}

inline EquivMap diagonal_map() {
  return {[](const HPoint& p) { return BiPoint{p, p}; },
          [](const HPoint&) { return std::array<Vec4, 2>{Vec4(1, 0, 1, 0), Vec4(0, 1, 0, 1)}; }};
}

// x -> (x, beta x), equivariant for the conjugate class
inline EquivMap conjugate_graph(const GroupElt& beta) {
  Mat2 b = beta.matrix();
  return {[b](const HPoint& p) { return BiPoint{p, mobius(b, p)}; }, {}};
}

inline double equivariance_residual(const EquivMap& m, const RepPair& r, const std::vector<HPoint>& samples) {
  double worst = 0;
  for (const auto& p : samples)
    for (int k = 0; k < 4; ++k) {
      BiPoint lhs = m.eval(mobius(r.deck[k], p));
      BiPoint rhs = act(r.gens[k], m.eval(p));
      worst = std::max(worst, bi_distance(lhs, rhs));
    }
  return worst;
}

// (x^2+y^2+1, -2x, x^2+y^2-1) / 2y: coordinates of f(z) in the J, K, K' basis
inline Vec3 hyperboloid(const HPoint& p) {
  double r2 = p.x * p.x + p.y * p.y;
  return {(r2 + 1) / (2 * p.y), -p.x / p.y, (r2 - 1) / (2 * p.y)};
}

inline HPoint from_hyperboloid(const Vec3& v) {
  double y = 1 / (v[0] - v[2]);
  return {-v[1] * y, y};
}

inline std::array<Vec3, 2> hyperboloid_d(const HPoint& p) {
  double x = p.x, y = p.y;
  return {Vec3(x / y, -1 / y, x / y),
          Vec3(-(x * x + 1) / (2 * y * y) + 0.5, x / (y * y), -(x * x - 1) / (2 * y * y) + 0.5)};
}

inline double minkowski(const Vec3& a, const Vec3& b) { return -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// signed hyperbolic area enclosed by a closed polygon (geodesic sides),
// positive for counterclockwise loops in the half-plane
inline double polygon_area(const std::vector<HPoint>& poly) {
  double s = 0;
  Vec3 p = hyperboloid(poly[0]);
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    Vec3 q = hyperboloid(poly[k]), r = hyperboloid(poly[k + 1]);
    Eigen::Matrix3d m;
    m << p, q, r;
    double den = 1 - minkowski(p, q) - minkowski(q, r) - minkowski(r, p);
    s += 2 * std::atan2(-m.determinant(), den);  // (x, y) -> (a, b, c) reverses orientation
  }
  return s;
}

// |Lambda^* Omega_rho| on the coordinate frame over the area element of h_l + h_r
inline double lagrangian_defect(const EquivMap& m, const HPoint& p) {
  BiPoint b = m.eval(p);
  auto d = map_partials(m, p);
  Eigen::Vector4d w(1 / (b.left.y * b.left.y), 1 / (b.left.y * b.left.y), 1 / (b.right.y * b.right.y),
                    1 / (b.right.y * b.right.y));
  double g11 = d[0].dot(w.cwiseProduct(d[0])), g22 = d[1].dot(w.cwiseProduct(d[1]));
  double g12 = d[0].dot(w.cwiseProduct(d[1]));
  double area = std::sqrt(std::max(g11 * g22 - g12 * g12, 0.0));
  if (area == 0) throw GeometryError(ErrorKind::degenerate_surface, "map is not immersive");
  return std::abs(omega_rho(b, d[0], d[1])) / area;
}

// Integrated version for maps that are only piecewise smooth: the mismatch
// between the areas of the two factor images of a small disk about p, over the
// disk's own area
inline double lagrangian_defect_area(const EquivMap& m, const HPoint& p, double radius = 0.05, int n = 1024) {
  double sy = std::sqrt(p.y);
  Mat2 to_p;
  to_p << sy, p.x / sy, 0, 1 / sy;
  std::vector<HPoint> left, right;
  for (int k = 0; k < n; ++k) {
    BiPoint b = m.eval(mobius(to_p * rotation_about_i(2 * pi * k / n) * boost(radius), HPoint{0, 1}));
    left.push_back(b.left);
    right.push_back(b.right);
  }
  double disk = 2 * pi * (std::cosh(radius) - 1);
  return std::abs(polygon_area(left) - polygon_area(right)) / disk;
}

// ---- invariant bumps

// phi(q) = A (1 - (q-1)/(Q-1))^4 for q = cosh d < Q = cosh R
struct BumpProfile {
  double amplitude = 0.1;
  double radius = 1.0;

  double value(double q) const {
    double big = std::cosh(radius);
    if (q >= big) return 0;
    double u = 1 - (q - 1) / (big - 1);
    return amplitude * u * u * u * u;
  }
  double derivative(double q) const {
    double big = std::cosh(radius);
    if (q >= big) return 0;
    double u = 1 - (q - 1) / (big - 1);
    return -4 * amplitude * u * u * u / (big - 1);
  }
};

// gradient of q = cosh d(z, c) in the coordinates of z
inline Eigen::Vector2d cosh_distance_gradient(const HPoint& z, const HPoint& c) {
  double dx = z.x - c.x, dy = z.y - c.y;
  return {dx / (z.y * c.y), dy / (z.y * c.y) - (dx * dx + dy * dy) / (2 * z.y * z.y * c.y)};
}

// h(z) = sum over gamma of phi(cosh d(z, frame gamma c)), invariant under frame Gamma frame^-1
class OrbitBump {
 public:
  OrbitBump(const RepPair& rep, const HPoint& centre, BumpProfile profile, const Mat2& frame = Mat2::Identity())
      : reduce_(rep), profile_(profile), frame_(frame), frame_inv_(sl2_inverse(frame)) {
    double reach = hyp_distance(centre, {0, 1}) + profile.radius + octagon::circumradius() + 0.05;
    for (const auto& g : group_ball(rep, reach)) centres_.push_back(mobius(g.deck, centre));
  }

  double value(const HPoint& z) const {
    double s = 0;
    for_each_centre(z, [&](const HPoint& c) { s += profile_.value(cosh_distance(z, c)); });
    return s;
  }

  Eigen::Vector2d gradient(const HPoint& z) const {
    Eigen::Vector2d g = Eigen::Vector2d::Zero();
    for_each_centre(z, [&](const HPoint& c) {
      g += profile_.derivative(cosh_distance(z, c)) * cosh_distance_gradient(z, c);
    });
    return g;
  }

  const BumpProfile& profile() const { return profile_; }

 private:
  template <class F>
  void for_each_centre(const HPoint& z, F&& f) const {
    Reduced red = reduce_(mobius(frame_inv_, z));
    Mat2 m = frame_ * red.deck;
    for (const auto& c : centres_) f(mobius(m, c));
  }

  DomainReducer reduce_;
  BumpProfile profile_;
  Mat2 frame_, frame_inv_;
  std::vector<HPoint> centres_;
};

// ---- surfaces in AdS^3

struct SurfaceAdS {
  std::function<Mat2(const HPoint&)> eval;
  std::function<std::array<Mat2, 2>(const HPoint&)> deriv;  // optional
};

inline std::array<Mat2, 2> surface_partials(const SurfaceAdS& s, const HPoint& p, double h = 1e-6) {
  if (s.deriv) return s.deriv(p);
  Mat2 c = s.eval(p);
  auto diff = [&](HPoint a, HPoint b) {
    return Mat2((align_sign(s.eval(a), c) - align_sign(s.eval(b), c)) / (2 * h));
  };
  return {diff({p.x + h, p.y}, {p.x - h, p.y}), diff({p.x, p.y + h}, {p.x, p.y - h})};
}

inline std::array<AlgVec, 2> body_tangents(const SurfaceAdS& s, const HPoint& p) {
  Mat2 ginv = sl2_inverse(s.eval(p));
  auto d = surface_partials(s, p);
  return {traceless(ginv * d[0]), traceless(ginv * d[1])};
}

inline Eigen::Matrix2d induced_metric(const SurfaceAdS& s, const HPoint& p) {
  auto b = body_tangents(s, p);
  Eigen::Matrix2d g;
  g << pairing(b[0], b[0]), pairing(b[0], b[1]), pairing(b[1], b[0]), pairing(b[1], b[1]);
  return g;
}

inline bool is_spacelike(const SurfaceAdS& s, const HPoint& p, double gate = 1e-8) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(induced_metric(s, p));
  return es.eigenvalues().minCoeff() > gate;
}

// unit future normal in body frame
inline FramePoint normal_lift(const SurfaceAdS& s, const HPoint& p) {
  if (!is_spacelike(s, p))
    throw GeometryError(ErrorKind::degenerate_surface, "surface not spacelike at sample");
  auto b = body_tangents(s, p);
  AlgVec n = cross(b[0], b[1]);
  double nn = pairing(n, n);
  if (nn >= 0) throw GeometryError(ErrorKind::degenerate_surface, "normal not timelike");
  n = n * (1 / std::sqrt(-nn));
  if (!is_future(n)) n = n * -1.0;
  return {GroupElt(s.eval(p)), n};
}

inline EquivMap gauss_map(const SurfaceAdS& s) {
  return {[s](const HPoint& p) { return project(normal_lift(s, p)); }, {}};
}

// sigma(x) = exp((pi/2) f(x)) beta^-1 = f(x) beta^-1; equivariant for rho_r = beta rho_l beta^-1
inline SurfaceAdS geodesic_plane_surface(const RepPair& rep) {
  if (rep.cls == RepClass::general)
    throw GeometryError(ErrorKind::unsupported_class, "geodesic plane needs a diagonal or conjugate class");
  Mat2 bi = sl2_inverse(rep.beta.matrix());
  return {[bi](const HPoint& p) { return Mat2(f_embed(p).m * bi); },
          [bi](const HPoint& p) {
            auto d = f_embed_d(p);
            return std::array<Mat2, 2>{d[0].m * bi, d[1].m * bi};
          }};
}

// sigma(x) = exp((pi/2 + h(x)) f(x)) beta^-1 with h invariant
inline SurfaceAdS bumped_plane_surface(const RepPair& rep, const OrbitBump& h) {
  if (rep.cls == RepClass::general)
    throw GeometryError(ErrorKind::unsupported_class, "bumped plane needs a diagonal or conjugate class");
  Mat2 bi = sl2_inverse(rep.beta.matrix());
  return {[bi, h](const HPoint& p) { return Mat2(exp_matrix(f_embed(p), pi / 2 + h.value(p)) * bi); },
          [bi, h](const HPoint& p) {
            double th = pi / 2 + h.value(p);
            Eigen::Vector2d dth = h.gradient(p);
            Mat2 u = f_embed(p).m;
            auto du = f_embed_d(p);
            std::array<Mat2, 2> out;
            for (int k = 0; k < 2; ++k)
              out[k] = (-std::sin(th) * dth[k] * Mat2::Identity() + std::cos(th) * dth[k] * u +
                        std::sin(th) * du[k].m) *
                       bi;
            return out;
          }};
}

}  // namespace adsflux
