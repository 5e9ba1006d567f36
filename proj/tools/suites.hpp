#pragma once

// Verification suites shared by the CLI and the acceptance runner. Every suite
// returns a list of checks; a check passes when its error is strictly below
// its tolerance, so a zero tolerance fails everything.

#include <Eigen/SVD>

#include <chrono>
#include <functional>
#include <random>

#include "scenario.hpp"

#include "adsflux/holonomy.hpp"
#include "adsflux/mesh.hpp"

namespace adsflux::cli {

struct Check {
  std::string name;
  double value = 0;
  double oracle = 0;
  double error = 0;
  double tolerance = 0;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  int criterion = 0;
  std::string name;
  std::vector<Check> checks;
  double seconds = 0;

  bool pass() const {
    if (checks.empty()) return false;
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

class Recorder {
 public:
  explicit Recorder(SuiteResult& s) : s_(s) {}

  void add(const std::string& name, double value, double oracle, double error, double tol, std::string note = {}) {
    s_.checks.push_back({name, value, oracle, error, tol, std::isfinite(error) && error < tol, std::move(note)});
  }
  // |value - oracle| against tol
  void near(const std::string& name, double value, double oracle, double tol) {
    add(name, value, oracle, std::abs(value - oracle), tol);
  }
  // residual against zero
  void small(const std::string& name, double residual, double tol) { add(name, residual, 0, residual, tol); }
  void fail(const std::string& name, const std::string& why) {
    s_.checks.push_back({name, NAN, NAN, NAN, NAN, false, why});
  }

  // numerical failures are recorded and the suite carries on
  template <class F>
  void guard(const std::string& name, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      fail(name, e.what());
    }
  }

 private:
  SuiteResult& s_;
};

namespace detail {

inline HPoint random_hpoint(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ux(-2.0, 2.0), uy(-1.5, 1.5);
  return {ux(rng), std::exp(uy(rng))};
}

inline AlgVec random_alg(std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  return AlgVec::from_coords(n(rng), n(rng), n(rng));
}

inline Mat2 random_sl2(std::mt19937_64& rng) {
  return exp_matrix(random_alg(rng, 0.5), 1.0) * exp_matrix(random_alg(rng, 0.5), 1.0);
}

inline FramePoint random_frame(std::mt19937_64& rng) { return {GroupElt(random_sl2(rng)), f_embed(random_hpoint(rng))}; }

inline HPoint near_i(double angle, double dist) { return mobius(rotation_about_i(angle) * boost(dist), HPoint{0, 1}); }

// points of the closed octagon
inline std::vector<HPoint> domain_samples(std::mt19937_64& rng, int n) {
  DomainReducer reduce(octagon_rep());
  std::uniform_real_distribution<double> ua(0, 2 * pi), ur(0, 1);
  std::vector<HPoint> out;
  while (static_cast<int>(out.size()) < n) {
    HPoint z = near_i(ua(rng), octagon::circumradius() * std::sqrt(ur(rng)));
    if (reduce(z).word.empty()) out.push_back(z);
  }
  return out;
}

inline double bi_err(const BiPoint& a, const BiPoint& b) { return (a.vec() - b.vec()).norm(); }

inline AlgVec unit_timelike(const AlgVec& x) { return x * (1 / std::sqrt(-pairing(x, x))); }

inline HamiltonianSpec bump_spec(double left_amp, double right_amp, double dist_amp) {
  HamiltonianSpec h;
  if (left_amp != 0) h.left_bumps.push_back({near_i(0.3, 0.4), {left_amp, 1.0}});
  if (right_amp != 0) h.right_bumps.push_back({near_i(2.5, 0.4), {right_amp, 1.0}});
  h.distance_amplitude = dist_amp;
  h.distance_width = 0.5;
  return h;
}

inline std::shared_ptr<const SurfaceMesh> mesh_for(const Config& c) {
  static std::map<int, std::shared_ptr<const SurfaceMesh>> cache;
  auto& m = cache[c.mesh_resolution];
  if (!m) m = std::make_shared<const SurfaceMesh>(SurfaceMesh::build(octagon_rep(), c.mesh_resolution));
  return m;
}

inline HolonomyOptions smooth_holonomy(const Config& c) {
  HolonomyOptions o;
  o.samples_per_letter = c.holonomy_samples;
  o.lagrangian_tol = c.t("lagrangian");
  return o;
}

inline HolonomyOptions mesh_holonomy(const Config& c) {
  HolonomyOptions o;
  o.samples_per_letter = c.holonomy_samples_mesh;
  o.lagrangian_radius = 0.05;
  o.lagrangian_tol = c.t("lagrangian_mesh");
  return o;
}

inline FluxOptions mesh_flux(const Config& c) {
  FluxOptions o;
  o.s_panels = c.flux_panels_mesh;
  return o;
}

inline double agreement_tol(const Config& c, double reference) {
  return std::max(c.t("agreement_abs"), c.t("agreement_rel") * std::abs(reference));
}

inline std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", x);
  return buf;
}

}  // namespace detail

// 1. metric and embedding
inline void suite_metric(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  double norm = 0, equiv = 0;
  for (int i = 0; i < c.metric_samples; ++i) {
    HPoint x = random_hpoint(rng);
    Mat2 g = random_sl2(rng);
    AlgVec fx = f_embed(x);
    norm = std::max(norm, std::abs(pairing(fx, fx) + 1));
    Mat2 lhs = f_embed(mobius(g, x)).m, rhs = g * fx.m * sl2_inverse(g);
    equiv = std::max(equiv, (lhs - rhs).norm() / (1 + rhs.norm()));
  }
  rec.small("metric.unit_timelike", norm, c.t("metric"));
  rec.small("metric.equivariance", equiv, c.t("metric"));
}

// 2. fibres of the projection
inline void suite_fiber(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  double fib = 0, eq = 0;
  std::uniform_real_distribution<double> ut(-4, 4);
  for (int i = 0; i < c.fiber_samples; ++i) {
    FramePoint f = random_frame(rng);
    fib = std::max(fib, bi_err(project(geodesic_flow(f, ut(rng))), project(f)));
    IsomPair a{GroupElt(random_sl2(rng)), GroupElt(random_sl2(rng))};
    eq = std::max(eq, bi_err(project(act(a, f)), act(a, project(f))));
  }
  rec.small("fiber.flow_invariance", fib, c.t("fiber"));
  rec.small("fiber.projection_equivariance", eq, c.t("fiber"));
}

// 3. the geodesic flow preserves the Sasaki pairing
inline void suite_sasaki(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  double worst = 0;
  std::uniform_real_distribution<double> ut(-2, 2);
  for (int i = 0; i < c.sasaki_samples; ++i) {
    FramePoint f = random_frame(rng);
    double t = ut(rng);
    FrameTangent tan[2], pushed[2];
    for (int k = 0; k < 2; ++k) {
      AlgVec w = random_alg(rng), a = random_alg(rng);
      AlgVec v = a + pairing(a, f.u0) * f.u0;
      tan[k] = {w, v};
      AlgVec du = v - cross(w, f.u0);
      FramePath path{[=](double s) {
                       return geodesic_flow(
                           FramePoint{GroupElt(f.g.matrix() * exp_matrix(w, s)), unit_timelike(f.u0 + s * du)}, t);
                     },
                     {}};
      pushed[k] = frame_tangent(path, 0.0, {1e-5, false, 0});
    }
    FramePoint ft = geodesic_flow(f, t);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double before = sasaki_pairing(f, tan[a], tan[b]);
        double after = sasaki_pairing(ft, pushed[a], pushed[b]);
        worst = std::max(worst, std::abs(before - after) / (1 + std::abs(before)));
      }
  }
  rec.small("sasaki.flow_isometry", worst, c.t("sasaki"));
}

// 4. left and right foliations meet along the flow lines
inline void suite_foliation(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  auto rank = [](const Eigen::MatrixXd& m) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    auto s = svd.singularValues();
    int r = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > 1e-6 * s[0]) ++r;
    return r;
  };
  int bad_sum = 0, bad_meet = 0;
  for (int i = 0; i < c.foliation_samples; ++i) {
    FramePoint f = random_frame(rng);
    auto l = foliation_tangents(Side::left, f);
    auto r = foliation_tangents(Side::right, f);
    Eigen::MatrixXd ml(6, 3), mr(6, 3), sum(6, 6);
    for (int k = 0; k < 3; ++k) {
      ml.col(k) = l[k];
      mr.col(k) = r[k];
      sum.col(k) = l[k];
      sum.col(3 + k) = r[k];
    }
    int rs = rank(sum);
    bad_sum += rs != 5;
    bad_meet += rank(ml) + rank(mr) - rs != 1;
  }
  rec.add("foliation.sum_rank_5", bad_sum, 0, bad_sum, c.t("foliation_mismatch"), "samples with rank != 5");
  rec.add("foliation.intersection_rank_1", bad_meet, 0, bad_meet, c.t("foliation_mismatch"),
          "samples with intersection rank != 1");
}

// 5. curvature: loop defect against symplectic area
inline void suite_curvature(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  std::normal_distribution<double> n(0, 1);
  double worst = 0;
  for (int k = 0; k < c.squares; ++k) {
    BiPoint corner{random_hpoint(rng), random_hpoint(rng)};
    Vec4 e1(n(rng), n(rng), n(rng), n(rng)), e2(n(rng), n(rng), n(rng), n(rng));
    e1 *= c.square_side / e1.norm();
    e2 *= c.square_side / e2.norm();
    rec.guard("curvature.random_squares", [&] {
      DiskMap sq = coordinate_square(corner, e1, e2);
      double area = symplectic_area(sq), defect = loop_defect(disk_boundary(sq));
      worst = std::max(worst, std::abs(defect + 0.5 * area) / std::abs(area));
    });
  }
  rec.add("curvature.random_squares", worst, 0, worst, c.t("curvature"), "max |defect + area/2| / |area|");
  BiPoint corner{{0.3, 1.1}, {-0.2, 0.9}};
  Vec4 e1(1, 0.2, 0.5, 0), e2(0.1, 1, 0, -0.4);
  for (double eps : c.curvature_eps) {
    std::string name = "curvature.ratio_eps_" + fmt(eps);
    rec.guard(name, [&] {
      DiskMap sq = coordinate_square(corner, eps * e1, eps * e2);
      double ratio = loop_defect(disk_boundary(sq)) / symplectic_area(sq);
      rec.add(name, ratio, -0.5, std::abs(ratio + 0.5) / 0.5, c.t("curvature_scan") * eps, "relative error");
    });
  }
}

// 6. Gauss maps
inline void suite_gauss(const Config& c, std::mt19937_64& rng, Recorder& rec) {
  using namespace detail;
  RepPair diag = octagon_rep();
  RepPair conj = conjugate_rep(diag, GroupElt(random_sl2(rng)));
  auto samples = domain_samples(rng, c.lagrangian_samples);
  double graph = 0, horiz = 0, lag = 0, metric = 0;
  std::normal_distribution<double> n(0, 1);
  for (const RepPair* r : {&diag, &conj}) {
    SurfaceAdS plane = geodesic_plane_surface(*r);
    EquivMap g = gauss_map(plane);
    OrbitBump bump(*r, near_i(0.7, 0.4), {0.05, 1.0});
    SurfaceAdS bumped = bumped_plane_surface(*r, bump);
    EquivMap gb = gauss_map(bumped);
    for (std::size_t k = 0; k < samples.size(); ++k) {
      const HPoint& p = samples[k];
      if (k % 10 == 0) {
        graph = std::max(graph, bi_err(g.eval(p), {p, mobius(r->beta, p)}));
        for (const SurfaceAdS* s : {&plane, &bumped}) {
          Eigen::Vector2d v(n(rng), n(rng));
          FramePath path{[&](double t) { return normal_lift(*s, {p.x + t * v[0], p.y + t * v[1]}); }, {}};
          horiz = std::max(horiz, std::abs(connection_along(path, 0.0)));
        }
        Eigen::Matrix2d expect = Eigen::Matrix2d::Identity() / (p.y * p.y);
        metric = std::max(metric, (induced_metric(plane, p) - expect).norm() * p.y * p.y);
      }
      // half the samples on each class
      if ((k % 2 == 0) == (r == &diag)) lag = std::max(lag, lagrangian_defect(gb, p));
    }
  }
  rec.small("gauss.plane_graph", graph, c.t("gauss_graph"));
  rec.small("gauss.horizontality", horiz, c.t("horizontality"));
  rec.small("gauss.lagrangian_defect", lag, c.t("lagrangian"));
  rec.small("gauss.induced_metric", metric, c.t("induced_metric"));
}

// 7. flux and holonomy on Hamiltonian and harmonic families
inline void suite_flux_holonomy(const Config& c, std::mt19937_64&, Recorder& rec) {
  using namespace detail;
  RepPair r = octagon_rep();
  EquivMap diag = diagonal_map();
  IsotopyPath ham = hamiltonian_isotopy(r, bump_spec(0.08, 0.06, 0.05), c.hamiltonian_duration, diag, c.ode_step);
  EquivMap ham_end = ham.at_time(1.0);
  for (const auto& w : c.loops) {
    LoopWord word = LoopWord::parse(w);
    rec.guard("hamiltonian.flux." + w, [&] { rec.small("hamiltonian.flux." + w, std::abs(flux(ham, word, r)), c.t("hamiltonian")); });
    rec.guard("hamiltonian.holonomy." + w, [&] {
      double h = relative_holonomy(ham_end, diag, word, r, std::nullopt, smooth_holonomy(c));
      rec.small("hamiltonian.holonomy." + w, std::abs(h), c.t("hamiltonian"));
    });
  }
  auto theta = std::make_shared<const HarmonicForm>(harmonic_one_form(mesh_for(c), c.harmonic_periods));
  for (double d : c.harmonic_durations) {
    IsotopyPath path = closed_form_isotopy(r, theta, d);
    EquivMap end = path.at_time(1.0);
    for (const auto& w : c.loops) {
      LoopWord word = LoopWord::parse(w);
      std::string tag = "harmonic.d" + fmt(d) + "." + w;
      double expect = d * theta->shift(word.exponents());
      rec.guard(tag, [&] {
        double fl = flux(path, word, r, mesh_flux(c));
        double h = relative_holonomy(end, diag, word, r, std::nullopt, mesh_holonomy(c));
        rec.near(tag + ".flux_vs_period", fl, expect, agreement_tol(c, expect));
        rec.near(tag + ".holonomy_vs_period", h, expect, agreement_tol(c, expect));
        rec.near(tag + ".holonomy_vs_flux", h, fl, agreement_tol(c, fl));
      });
    }
  }
}

// 8. holonomy anchored at the geodesic plane
inline void suite_orbit(const Config& c, std::mt19937_64&, Recorder& rec) {
  using namespace detail;
  RepPair r = octagon_rep();
  EquivMap anchor = holonomy_anchor(r);
  double dur = c.hamiltonian_duration;
  std::vector<std::pair<std::string, IsotopyPath>> fams;
  fams.emplace_back("left_bump", hamiltonian_isotopy(r, bump_spec(0.08, 0, 0), dur, anchor, c.ode_step));
  fams.emplace_back("right_bump", hamiltonian_isotopy(r, bump_spec(0, 0.06, 0), dur, anchor, c.ode_step));
  fams.emplace_back("both_bumps", hamiltonian_isotopy(r, bump_spec(0.08, 0.06, 0), dur, anchor, c.ode_step));
  fams.emplace_back("bumps_distance", hamiltonian_isotopy(r, bump_spec(0.08, 0.06, 0.05), dur, anchor, c.ode_step));
  {
    IsotopyPath first = hamiltonian_isotopy(r, bump_spec(0.08, 0, 0), dur, anchor, c.ode_step);
    IsotopyPath second = hamiltonian_isotopy(r, bump_spec(0, 0, 0.05), dur, first.at_time(1.0), c.ode_step);
    fams.emplace_back("composite", concatenate(first, second));
  }
  for (const auto& [name, path] : fams) {
    EquivMap end = path.at_time(1.0);
    for (const auto& w : c.loops) {
      LoopWord word = LoopWord::parse(w);
      std::string tag = "orbit." + name + "." + w;
      rec.guard(tag + ".anchored", [&] {
        rec.small(tag + ".anchored", std::abs(anchored_holonomy(r, end, word, std::nullopt, smooth_holonomy(c))),
                  c.t("hamiltonian"));
      });
      rec.guard(tag + ".closure", [&] {
        rec.small(tag + ".closure", std::abs(section_closure_defect(end, word, r, smooth_holonomy(c))),
                  c.t("closure"));
      });
    }
  }
  // a deformation with nonzero flux
  auto theta = std::make_shared<const HarmonicForm>(harmonic_one_form(mesh_for(c), c.harmonic_periods));
  double d = c.harmonic_durations.empty() ? 0.1 : c.harmonic_durations.back();
  IsotopyPath path = closed_form_isotopy(r, theta, d);
  EquivMap end = path.at_time(1.0);
  for (const auto& w : c.loops) {
    LoopWord word = LoopWord::parse(w);
    std::string tag = "orbit.harmonic." + w;
    rec.guard(tag, [&] {
      double fl = flux(path, word, r, mesh_flux(c));
      double h = anchored_holonomy(r, end, word, std::nullopt, mesh_holonomy(c));
      rec.near(tag + ".anchored_vs_flux", h, fl, agreement_tol(c, fl));
    });
  }
}

// 9. infrastructure
inline void suite_infrastructure(const Config& c, std::mt19937_64&, Recorder& rec) {
  rec.small("infra.relator_residual", relator_residual(octagon_rep()), c.t("relator"));
  auto mesh = detail::mesh_for(c);
  rec.add("infra.mesh_euler_characteristic", mesh->euler_characteristic(), -2,
          std::abs(mesh->euler_characteristic() + 2), c.t("foliation_mismatch"));
  double worst_period = 0, worst_coclosed = 0;
  for (int g = 0; g < 4; ++g) {
    std::array<double, 4> p{0, 0, 0, 0};
    p[g] = 1;
    HarmonicForm f = harmonic_one_form(mesh, p);
    worst_coclosed = std::max(worst_coclosed, f.coclosed_residual);
    for (int k = 0; k < 4; ++k)
      worst_period = std::max(worst_period, std::abs(f.period(LoopWord::generator(k)) - p[k]));
  }
  rec.small("infra.harmonic_periods", worst_period, c.t("periods"));
  rec.small("infra.coclosed_residual", worst_coclosed, c.t("coclosed"));
}

struct SuiteDef {
  int criterion;
  const char* name;
  void (*run)(const Config&, std::mt19937_64&, Recorder&);
};

inline const std::vector<SuiteDef>& suites() {
  static const std::vector<SuiteDef> s{
      {1, "metric", suite_metric},         {2, "fiber", suite_fiber},
      {3, "sasaki", suite_sasaki},         {4, "foliation", suite_foliation},
      {5, "curvature", suite_curvature},   {6, "gauss", suite_gauss},
      {7, "flux_holonomy", suite_flux_holonomy}, {8, "orbit", suite_orbit},
      {9, "infrastructure", suite_infrastructure}};
  return s;
}

inline SuiteResult run_suite(const SuiteDef& def, const Config& c, std::uint64_t seed) {
  SuiteResult res;
  res.criterion = def.criterion;
  res.name = def.name;
  std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(def.criterion));
  Recorder rec(res);
  auto t0 = std::chrono::steady_clock::now();
  rec.guard(std::string(def.name) + ".setup", [&] { def.run(c, rng, rec); });
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::stable_sort(res.checks.begin(), res.checks.end(),
                   [](const Check& a, const Check& b) { return a.name < b.name; });
  return res;
}

inline json check_json(const Check& k) {
  auto num = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
  json j{{"name", k.name},         {"value", num(k.value)}, {"oracle", num(k.oracle)},
         {"error", num(k.error)},  {"tolerance", num(k.tolerance)}, {"pass", k.pass}};
  if (!k.note.empty()) j["note"] = k.note;
  return j;
}

inline json suite_json(const SuiteResult& s) {
  json checks = json::array();
  for (const auto& k : s.checks) checks.push_back(check_json(k));
  return {{"criterion", s.criterion}, {"name", s.name}, {"pass", s.pass()}, {"checks", checks}};
}

}  // namespace adsflux::cli
