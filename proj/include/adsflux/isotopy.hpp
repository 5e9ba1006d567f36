#pragma once

// Paths of equivariant maps, their flux over lifted loops, and Hamiltonian
// isotopies generated by invariant functions on H^2 x H^2.

#include <algorithm>
#include <memory>

#include "adsflux/surfaces.hpp"

namespace adsflux {

struct IsotopyPath {
  // positions at the requested times t in [0,1] for one domain point
  std::function<std::vector<BiPoint>(const HPoint&, const std::vector<double>&)> sweep;
  // d/dt at a point on the path, if known
  std::function<Vec4(const BiPoint&, double)> velocity;

  BiPoint at(const HPoint& x, double t) const { return sweep(x, {t})[0]; }

  EquivMap at_time(double t) const {
    auto sw = sweep;
    return {[sw, t](const HPoint& x) { return sw(x, {t})[0]; }, {}};
  }
};

inline IsotopyPath constant_path(const EquivMap& m) {
  return {[m](const HPoint& x, const std::vector<double>& ts) { return std::vector<BiPoint>(ts.size(), m.eval(x)); },
          [](const BiPoint&, double) { return Vec4::Zero().eval(); }};
}

// factor-wise geodesic interpolation; equivariant because isometries preserve geodesics
inline IsotopyPath geodesic_interpolation(const EquivMap& a, const EquivMap& b) {
  return {[a, b](const HPoint& x, const std::vector<double>& ts) {
            BiPoint p = a.eval(x), q = b.eval(x);
            std::vector<BiPoint> out;
            for (double t : ts) out.push_back({geodesic_point(p.left, q.left, t), geodesic_point(p.right, q.right, t)});
            return out;
          },
          {}};
}

inline IsotopyPath reversed(const IsotopyPath& p) {
  return {[p](const HPoint& x, const std::vector<double>& ts) {
            std::vector<double> rs;
            for (double t : ts) rs.push_back(1 - t);
            return p.sweep(x, rs);
          },
          {}};
}

// a on [0, 1/2], then b; b must start where a ends
inline IsotopyPath concatenate(const IsotopyPath& a, const IsotopyPath& b) {
  return {[a, b](const HPoint& x, const std::vector<double>& ts) {
            std::vector<double> ta, tb;
            for (double t : ts) (t <= 0.5 ? ta : tb).push_back(t <= 0.5 ? 2 * t : 2 * t - 1);
            auto ra = ta.empty() ? std::vector<BiPoint>{} : a.sweep(x, ta);
            auto rb = tb.empty() ? std::vector<BiPoint>{} : b.sweep(x, tb);
            std::vector<BiPoint> out;
            std::size_t ia = 0, ib = 0;
            for (double t : ts) out.push_back(t <= 0.5 ? ra[ia++] : rb[ib++]);
            return out;
          },
          {}};
}

struct FluxOptions {
  int s_panels = 4;  // per letter of the loop word
  int t_panels = 2;
  int order = 8;  // Gauss-Legendre points per panel
  double s_step = 1e-5;
  double t_step = 1e-5;
};

// integral over S^1 x [0,1] of F^* Omega_rho, F(s,t) = Lambda_t(l(s)), orientation ds dt
inline double flux(const IsotopyPath& path, const LoopWord& word, const RepPair& rep, const FluxOptions& opt = {}) {
  DomainPath loop = DomainPath::lifted(word, rep);
  auto gl = gauss_legendre(opt.order);
  std::vector<double> tn, tw;
  for (int p = 0; p < opt.t_panels; ++p)
    for (int k = 0; k < opt.order; ++k) {
      tn.push_back((p + 0.5 * (1 + gl.first[k])) / opt.t_panels);
      tw.push_back(0.5 * gl.second[k] / opt.t_panels);
    }
  std::vector<double> times = tn;
  if (!path.velocity)
    for (double t : tn) {
      times.push_back(t - opt.t_step);
      times.push_back(t + opt.t_step);
    }
  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  std::vector<double> sorted;
  for (auto i : order) sorted.push_back(times[i]);
  auto sweep = [&](const HPoint& x) {
    auto r = path.sweep(x, sorted);
    std::vector<BiPoint> out(times.size());
    for (std::size_t i = 0; i < order.size(); ++i) out[order[i]] = r[i];
    return out;
  };
  const std::size_t n = tn.size();
  double total = 0;
  for (std::size_t seg = 0; seg < loop.segments.size(); ++seg)
    for (int p = 0; p < opt.s_panels; ++p)
      for (int k = 0; k < opt.order; ++k) {
        double s = (p + 0.5 * (1 + gl.first[k])) / opt.s_panels;
        double ws = 0.5 * gl.second[k] / opt.s_panels;
        auto mid = sweep(loop.point(seg, s));
        auto fwd = sweep(loop.point(seg, s + opt.s_step));
        auto bwd = sweep(loop.point(seg, s - opt.s_step));
        for (std::size_t j = 0; j < n; ++j) {
          Vec4 ds = (fwd[j].vec() - bwd[j].vec()) / (2 * opt.s_step);
          Vec4 dt = path.velocity ? path.velocity(mid[j], tn[j])
                                  : Vec4((mid[n + 2 * j + 1].vec() - mid[n + 2 * j].vec()) / (2 * opt.t_step));
          total += ws * tw[j] * omega_rho(mid[j], ds, dt);
        }
      }
  return total;
}

// ---- invariant Hamiltonians

struct HamiltonianSpec {
  std::vector<std::pair<HPoint, BumpProfile>> left_bumps;   // orbit bumps of the left factor
  std::vector<std::pair<HPoint, BumpProfile>> right_bumps;  // centres in domain coordinates, moved by beta
  double distance_amplitude = 0;  // A exp(-(q-1)/w), q = cosh d(x, beta^-1 y)
  double distance_width = 1;
};

class InvariantHamiltonian {
 public:
  InvariantHamiltonian(const RepPair& rep, const HamiltonianSpec& spec)
      : beta_(rep.beta.matrix()), beta_inv_(sl2_inverse(rep.beta.matrix())), spec_(spec) {
    if (rep.cls == RepClass::general)
      throw GeometryError(ErrorKind::unsupported_class, "no invariant Hamiltonian for a general class");
    for (const auto& [c, prof] : spec.left_bumps) left_.emplace_back(rep, c, prof);
    for (const auto& [c, prof] : spec.right_bumps) right_.emplace_back(rep, c, prof, beta_);
  }

  double value(const BiPoint& b) const {
    double h = 0;
    for (const auto& f : left_) h += f.value(b.left);
    for (const auto& f : right_) h += f.value(b.right);
    if (spec_.distance_amplitude != 0) {
      double q = cosh_distance(b.left, mobius(beta_inv_, b.right));
      h += spec_.distance_amplitude * std::exp(-(q - 1) / spec_.distance_width);
    }
    return h;
  }

  // (dH/dx_l, dH/dy_l, dH/dx_r, dH/dy_r)
  Vec4 gradient(const BiPoint& b) const {
    Vec4 g = Vec4::Zero();
    for (const auto& f : left_) g.head<2>() += f.gradient(b.left);
    for (const auto& f : right_) g.tail<2>() += f.gradient(b.right);
    if (spec_.distance_amplitude != 0) {
      HPoint yb = mobius(beta_inv_, b.right), xb = mobius(beta_, b.left);
      double q = cosh_distance(b.left, yb);
      double dq = -spec_.distance_amplitude / spec_.distance_width * std::exp(-(q - 1) / spec_.distance_width);
      // cosh d(x, beta^-1 y) = cosh d(beta x, y)
      g.head<2>() += dq * cosh_distance_gradient(b.left, yb);
      g.tail<2>() += dq * cosh_distance_gradient(b.right, xb);
    }
    return g;
  }

  // Omega_rho(xi, .) = dH with Omega_rho = dx dy / y^2 (left) - (right)
  Vec4 symplectic_gradient(const BiPoint& b) const {
    Vec4 g = gradient(b);
    double l2 = b.left.y * b.left.y, r2 = b.right.y * b.right.y;
    return {l2 * g[1], -l2 * g[0], -r2 * g[3], r2 * g[2]};
  }

 private:
  Mat2 beta_, beta_inv_;
  HamiltonianSpec spec_;
  std::vector<OrbitBump> left_, right_;
};

using VectorField = std::function<Vec4(const BiPoint&)>;

// RK4 with fixed step in flow time, stopping exactly at each requested t*duration
inline std::vector<BiPoint> rk4_sweep(const VectorField& field, const BiPoint& start, double duration,
                                      const std::vector<double>& ts, double step) {
  std::vector<BiPoint> out;
  Vec4 y = start.vec();
  double now = 0;
  auto advance = [&](double h) {
    Vec4 k1 = field(BiPoint::from(y));
    Vec4 k2 = field(BiPoint::from(y + 0.5 * h * k1));
    Vec4 k3 = field(BiPoint::from(y + 0.5 * h * k2));
    Vec4 k4 = field(BiPoint::from(y + h * k3));
    y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!(y[1] > 0 && y[3] > 0) || !y.allFinite())
      throw GeometryError(ErrorKind::ode_step, "flow left the upper half-plane");
  };
  for (double t : ts) {
    double target = t * duration;
    if (target < now - 1e-15) throw std::invalid_argument("sweep times must be ascending");
    while (target - now > 1e-15) {
      double h = std::min(step, target - now);
      advance(h);
      now += h;
    }
    out.push_back(BiPoint::from(y));
  }
  return out;
}

inline IsotopyPath hamiltonian_isotopy(const RepPair& rep, const HamiltonianSpec& spec, double duration,
                                       const EquivMap& start, double step = 1e-3) {
  auto ham = std::make_shared<InvariantHamiltonian>(rep, spec);
  VectorField field = [ham](const BiPoint& b) { return ham->symplectic_gradient(b); };
  return {[field, start, duration, step](const HPoint& x, const std::vector<double>& ts) {
            return rk4_sweep(field, start.eval(x), duration, ts, step);
          },
          [field, duration](const BiPoint& b, double) { return Vec4(duration * field(b)); }};
}

}  // namespace adsflux
