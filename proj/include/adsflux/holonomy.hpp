#pragma once

// Holonomy of the flat bundles Lambda^* P_rho over Lagrangian maps, relative to
// a reference map and anchored at the geodesic-plane Gauss map.
//
// hol(tau) = integral of Sigma^* omega over the lifted loop for a section that
// is equivariant under the lifted action. With the canonical section this is
// -T + c(b0), where T is the transport offset along the loop and c the fibre
// gap between rho(tau) Sigma(b0) and Sigma(rho(tau) b0). The lift of c is not
// computable on its own; only its variation along a connector is, and that is
// what the relative holonomy uses.

#include <optional>

#include "adsflux/bundle_transport.hpp"
#include "adsflux/isotopy.hpp"

namespace adsflux {

struct HolonomyOptions {
  TransportOptions transport{};
  int samples_per_letter = 0;  // 0: integrate the map directly, else a piecewise-geodesic polyline
  double step_bound = 0.05;
  double lagrangian_tol = 1e-6;
  int lagrangian_checks = 3;  // per letter; 0 disables the gate
  double lagrangian_radius = 0;  // > 0: integrated check over disks, for piecewise-smooth maps
};

// Lambda o (lifted loop) as a base path
inline BasePath loop_image(const EquivMap& m, const LoopWord& w, const RepPair& rep, const HolonomyOptions& opt = {}) {
  DomainPath loop = DomainPath::lifted(w, rep);
  if (opt.samples_per_letter > 0) {
    std::vector<BiPoint> pts;
    for (std::size_t seg = 0; seg < loop.segments.size(); ++seg)
      for (int k = seg == 0 ? 0 : 1; k <= opt.samples_per_letter; ++k)
        pts.push_back(m.eval(loop.point(seg, double(k) / opt.samples_per_letter)));
    return BasePath::from_samples(pts, opt.step_bound);
  }
  BasePath p;
  for (std::size_t seg = 0; seg < loop.segments.size(); ++seg) {
    auto a = loop.segments[seg];
    p.segments.push_back({[m, a](double s) { return m.eval(geodesic_point(a.first, a.second, s)); }, {}});
  }
  return p;
}

inline void check_lagrangian_on_loop(const EquivMap& m, const LoopWord& w, const RepPair& rep,
                                     const HolonomyOptions& opt) {
  if (opt.lagrangian_checks <= 0) return;
  DomainPath loop = DomainPath::lifted(w, rep);
  for (std::size_t seg = 0; seg < loop.segments.size(); ++seg)
    for (int k = 0; k < opt.lagrangian_checks; ++k) {
      double s = (k + 0.5) / opt.lagrangian_checks;
      HPoint x = loop.point(seg, s);
      double d = opt.lagrangian_radius > 0 ? lagrangian_defect_area(m, x, opt.lagrangian_radius)
                                           : lagrangian_defect(m, x);
      if (d > opt.lagrangian_tol)
        throw GeometryError(ErrorKind::non_lagrangian, "Lagrangian defect " + std::to_string(d) + " on the loop");
    }
}

// c(b) mod pi: rho(tau) Sigma(b) = phi_c Sigma(rho(tau) b)
inline double equivariance_gap(const IsomPair& g, const BiPoint& b) {
  return fiber_gap(canonical_section(act(g, b)), act(g, canonical_section(b)));
}

// hol_Lambda(tau) - hol_ref(tau); the connector runs from Lambda(x0) to ref(x0)
inline double relative_holonomy(const EquivMap& lam, const EquivMap& ref, const LoopWord& w, const RepPair& rep,
                                const std::optional<BasePath>& connector = std::nullopt,
                                const HolonomyOptions& opt = {}) {
  check_lagrangian_on_loop(lam, w, rep, opt);
  check_lagrangian_on_loop(ref, w, rep, opt);
  HPoint x0 = DomainPath::lifted(w, rep).start();
  BiPoint b0 = lam.eval(x0), b1 = ref.eval(x0);
  BasePath conn = connector ? *connector : BasePath::geodesic(b0, b1);
  if (bi_distance(conn.start(), b0) > 1e-9 || bi_distance(conn.end(), b1) > 1e-9)
    throw GeometryError(ErrorKind::endpoint_mismatch, "connector does not join the base points");
  IsomPair g = w.image(rep);
  double t_lam = transport_offset(loop_image(lam, w, rep, opt), opt.transport);
  double t_ref = transport_offset(loop_image(ref, w, rep, opt), opt.transport);
  // follow c along the connector, segment by segment
  double c0 = equivariance_gap(g, b0), c = c0;
  for (const auto& seg : conn.segments)
    c = track_mod_pi([&](double s) { return equivariance_gap(g, seg.at(s)); }, c);
  return -(t_lam - t_ref) - (c - c0);
}

// holonomy against the Gauss map of the totally geodesic plane, whose normal
// lift is a parallel section
inline EquivMap holonomy_anchor(const RepPair& rep) { return gauss_map(geodesic_plane_surface(rep)); }

inline double anchored_holonomy(const RepPair& rep, const EquivMap& lam, const LoopWord& w,
                                const std::optional<BasePath>& connector = std::nullopt,
                                const HolonomyOptions& opt = {}) {
  if (rep.cls == RepClass::general)
    throw GeometryError(ErrorKind::unsupported_class, "no anchor for a general class");
  return relative_holonomy(lam, holonomy_anchor(rep), w, rep, connector, opt);
}

// Transport a frame over Lambda(x0) around the loop and compare with its image
// under rho(tau); principal value mod pi, zero when a parallel section closes up.
inline double section_closure_defect(const EquivMap& lam, const LoopWord& w, const RepPair& rep,
                                     const HolonomyOptions& opt = {}) {
  BasePath p = loop_image(lam, w, rep, opt);
  BiPoint b0 = p.start(), b1 = p.end();
  double t = transport_offset(p, opt.transport);
  FramePoint moved = geodesic_flow(canonical_section(b1), t);
  return fiber_gap(act(w.image(rep), canonical_section(b0)), moved, 1e-7);
}

}  // namespace adsflux
