#pragma once

// Scenario configuration: JSON schema, defaults, validation.

#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "adsflux/fuchsian.hpp"
#include "adsflux/isotopy.hpp"

namespace adsflux::cli {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BumpSpec {
  HPoint centre{0, 1};
  double amplitude = 0.08;
  double radius = 1.0;
};

struct FamilySpec {
  std::string kind = "harmonic";  // harmonic | hamiltonian
  std::array<double, 4> periods{1, 0, 0, 0};
  double duration = 0.1;
  std::vector<BumpSpec> left_bumps, right_bumps;
  double distance_amplitude = 0.0, distance_width = 1.0;
  std::string reference = "diagonal";  // diagonal | anchor
};

struct Config {
  // representation
  std::string rep_kind = "octagon";  // octagon | conjugate | explicit
  Mat2 beta = Mat2::Identity();
  std::array<Mat2, 4> left_gens{}, right_gens{};

  // sample counts
  int metric_samples = 1000;
  int fiber_samples = 1000;
  int sasaki_samples = 200;
  int foliation_samples = 100;
  int squares = 20;
  int lagrangian_samples = 1000;

  std::vector<std::string> loops{"a1", "b1", "a2", "b2"};

  std::vector<double> curvature_eps{0.04, 0.02, 0.01};
  double square_side = 0.02;

  int mesh_resolution = 24;
  std::array<double, 4> harmonic_periods{1, 0, 0, 0};
  std::vector<double> harmonic_durations{0.05, 0.1, 0.2};
  int flux_panels_mesh = 64;
  int holonomy_samples_mesh = 1000;

  double hamiltonian_duration = 0.5;
  double ode_step = 1e-3;
  int holonomy_samples = 400;

  FamilySpec family;

  std::map<std::string, double> tol{
      {"metric", 1e-10},        {"fiber", 1e-9},          {"sasaki", 1e-6},        {"foliation_mismatch", 1},
      {"curvature", 1e-3},      {"curvature_scan", 1.25}, {"gauss_graph", 1e-8},   {"horizontality", 1e-7},
      {"lagrangian", 1e-6},     {"lagrangian_mesh", 1e-4}, {"induced_metric", 1e-8}, {"equivariance", 1e-8},
      {"hamiltonian", 1e-4},    {"agreement_rel", 0.02},  {"agreement_abs", 1e-4}, {"closure", 1e-4},
      {"relator", 1e-9},        {"periods", 1e-6},        {"coclosed", 1e-8}};

  std::string out_dir = "adsflux_out";

  double t(const std::string& k) const { return tol.at(k); }

  RepPair rep() const {
    if (rep_kind == "octagon") return octagon_rep();
    if (rep_kind == "conjugate") return conjugate_rep(octagon_rep(), GroupElt(beta));
    std::array<IsomPair, 4> g;
    for (int k = 0; k < 4; ++k) g[k] = {GroupElt(left_gens[k]), GroupElt(right_gens[k])};
    return general_rep(g);
  }

  HamiltonianSpec hamiltonian_spec() const {
    HamiltonianSpec h;
    for (const auto& b : family.left_bumps) h.left_bumps.push_back({b.centre, {b.amplitude, b.radius}});
    for (const auto& b : family.right_bumps) h.right_bumps.push_back({b.centre, {b.amplitude, b.radius}});
    h.distance_amplitude = family.distance_amplitude;
    h.distance_width = family.distance_width;
    return h;
  }
};

// walks a JSON object, rejecting unknown keys and wrong types
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }
  ~Reader() noexcept(false) {
    if (std::uncaught_exceptions()) return;
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(path_ + "." + k + ": unknown key");
  }

  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k);
  }
  const json& at(const std::string& k) { return j_.at(k); }
  std::string where(const std::string& k) const { return path_ + "." + k; }

  void number(const std::string& k, double& out, bool nonneg = false, bool positive = false) {
    if (!has(k)) return;
    if (!at(k).is_number()) throw ConfigError(where(k) + ": expected a number");
    out = at(k).get<double>();
    if (!std::isfinite(out) || (nonneg && out < 0) || (positive && out <= 0))
      throw ConfigError(where(k) + ": out of range");
  }
  void integer(const std::string& k, int& out, int lo, int hi) {
    if (!has(k)) return;
    if (!at(k).is_number_integer()) throw ConfigError(where(k) + ": expected an integer");
    long long v = at(k).get<long long>();
    if (v < lo || v > hi) throw ConfigError(where(k) + ": out of range");
    out = static_cast<int>(v);
  }
  void string(const std::string& k, std::string& out, const std::set<std::string>& allowed) {
    if (!has(k)) return;
    if (!at(k).is_string()) throw ConfigError(where(k) + ": expected a string");
    out = at(k).get<std::string>();
    if (!allowed.empty() && !allowed.count(out)) throw ConfigError(where(k) + ": unsupported value " + out);
  }
  void numbers(const std::string& k, std::vector<double>& out, bool positive) {
    if (!has(k)) return;
    if (!at(k).is_array()) throw ConfigError(where(k) + ": expected an array");
    out.clear();
    for (const auto& v : at(k)) {
      if (!v.is_number()) throw ConfigError(where(k) + ": expected numbers");
      double x = v.get<double>();
      if (!std::isfinite(x) || (positive && x <= 0)) throw ConfigError(where(k) + ": out of range");
      out.push_back(x);
    }
  }
  template <std::size_t N>
  void fixed(const std::string& k, std::array<double, N>& out) {
    if (!has(k)) return;
    std::vector<double> v;
    numbers(k, v, false);
    if (v.size() != N) throw ConfigError(where(k) + ": expected " + std::to_string(N) + " numbers");
    std::copy(v.begin(), v.end(), out.begin());
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

inline Mat2 read_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) throw ConfigError(where + ": expected [a, b, c, d]");
  Mat2 m;
  for (int k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw ConfigError(where + ": expected numbers");
    m(k / 2, k % 2) = j[k].get<double>();
  }
  if (std::abs(m.determinant() - 1) > 1e-9) throw ConfigError(where + ": determinant must be 1");
  return m;
}

inline std::vector<BumpSpec> read_bumps(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array");
  std::vector<BumpSpec> out;
  int i = 0;
  for (const auto& b : j) {
    std::string w = where + "[" + std::to_string(i++) + "]";
    BumpSpec s;
    Reader r(b, w);
    std::array<double, 2> c{0, 1};
    r.fixed("centre", c);
    if (c[1] <= 0) throw ConfigError(w + ".centre: must lie in the upper half-plane");
    s.centre = {c[0], c[1]};
    r.number("amplitude", s.amplitude);
    r.number("radius", s.radius, false, true);
    out.push_back(s);
  }
  return out;
}

inline Config parse_config(const json& j) {
  Config c;
  Reader top(j, "config");
  if (top.has("representation")) {
    Reader r(top.at("representation"), "config.representation");
    r.string("kind", c.rep_kind, {"octagon", "conjugate", "explicit"});
    if (r.has("beta")) c.beta = read_matrix(r.at("beta"), r.where("beta"));
    for (const char* side : {"left", "right"})
      if (r.has(side)) {
        const json& a = r.at(side);
        if (!a.is_array() || a.size() != 4) throw ConfigError(r.where(side) + ": expected four matrices");
        for (int k = 0; k < 4; ++k)
          (std::string(side) == "left" ? c.left_gens : c.right_gens)[k] =
              read_matrix(a[k], r.where(side) + "[" + std::to_string(k) + "]");
      }
    if (c.rep_kind == "explicit" && !(r.has("left") && r.has("right")))
      throw ConfigError("config.representation: explicit needs left and right generators");
  }
  if (top.has("samples")) {
    Reader r(top.at("samples"), "config.samples");
    r.integer("metric", c.metric_samples, 1, 1000000);
    r.integer("fiber", c.fiber_samples, 1, 1000000);
    r.integer("sasaki", c.sasaki_samples, 1, 1000000);
    r.integer("foliation", c.foliation_samples, 1, 1000000);
    r.integer("squares", c.squares, 1, 100000);
    r.integer("lagrangian", c.lagrangian_samples, 2, 1000000);
  }
  if (top.has("loops")) {
    const json& l = top.at("loops");
    if (!l.is_array()) throw ConfigError("config.loops: expected an array of words");
    c.loops.clear();
    for (const auto& w : l) {
      if (!w.is_string()) throw ConfigError("config.loops: expected strings");
      try {
        LoopWord::parse(w.get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError("config.loops: " + std::string(e.what()));
      }
      c.loops.push_back(w.get<std::string>());
    }
  }
  if (top.has("curvature")) {
    Reader r(top.at("curvature"), "config.curvature");
    r.numbers("eps", c.curvature_eps, true);
    r.number("square_side", c.square_side, false, true);
  }
  if (top.has("harmonic")) {
    Reader r(top.at("harmonic"), "config.harmonic");
    r.integer("mesh_resolution", c.mesh_resolution, 2, 200);
    r.fixed("periods", c.harmonic_periods);
    r.numbers("durations", c.harmonic_durations, true);
    r.integer("flux_panels", c.flux_panels_mesh, 1, 10000);
    r.integer("holonomy_samples", c.holonomy_samples_mesh, 10, 1000000);
  }
  if (top.has("hamiltonian")) {
    Reader r(top.at("hamiltonian"), "config.hamiltonian");
    r.number("duration", c.hamiltonian_duration, true);
    r.number("ode_step", c.ode_step, false, true);
    r.integer("holonomy_samples", c.holonomy_samples, 10, 1000000);
  }
  if (top.has("family")) {
    Reader r(top.at("family"), "config.family");
    r.string("kind", c.family.kind, {"harmonic", "hamiltonian"});
    r.fixed("periods", c.family.periods);
    r.number("duration", c.family.duration, true);
    if (r.has("left_bumps")) c.family.left_bumps = read_bumps(r.at("left_bumps"), r.where("left_bumps"));
    if (r.has("right_bumps")) c.family.right_bumps = read_bumps(r.at("right_bumps"), r.where("right_bumps"));
    r.number("distance_amplitude", c.family.distance_amplitude);
    r.number("distance_width", c.family.distance_width, false, true);
    r.string("reference", c.family.reference, {"diagonal", "anchor"});
  }
  if (top.has("tolerances")) {
    Reader r(top.at("tolerances"), "config.tolerances");
    for (auto& [k, v] : c.tol) r.number(k, v, true);
  }
  if (top.has("output_dir")) {
    if (!top.at("output_dir").is_string()) throw ConfigError("config.output_dir: expected a string");
    c.out_dir = top.at("output_dir").get<std::string>();
  }
  return c;
}

inline Config load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace adsflux::cli
