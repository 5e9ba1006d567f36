#pragma once

// Triangulated octagon with side identifications (a genus-2 surface), discrete
// harmonic 1-forms from the cotangent Laplacian, and the flow of the induced
// symplectic vector field.
//
// Triangles are interpolated projectively on the hyperboloid: with lambda the
// solution of P = sum lambda_k P_k, a vertex function interpolates as
// sum lambda_k u_k / sum lambda_k. Level sets are then geodesic arcs, so the
// Hamiltonian flow inside a triangle runs along an explicit geodesic and its
// timing integrates in closed form.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <istream>
#include <map>
#include <memory>
#include <ostream>
#include <sstream>

#include "adsflux/isotopy.hpp"

namespace adsflux {

// Euclidean area of the triangle with the given side lengths
inline double heron(double a, double b, double c) {
  double s = 0.5 * (a + b + c);
  return std::sqrt(std::max(s * (s - a) * (s - b) * (s - c), 0.0));
}

// hyperbolic area of the geodesic triangle
inline double hyperbolic_area(const HPoint& a, const HPoint& b, const HPoint& c) {
  Vec3 p = hyperboloid(a), q = hyperboloid(b), r = hyperboloid(c);
  Eigen::Matrix3d m;
  m << p, q, r;
  double den = 1 - minkowski(p, q) - minkowski(q, r) - minkowski(r, p);
  return 2 * std::atan2(std::abs(m.determinant()), den);
}

struct EdgeIdent {
  int a, b;  // boundary edge on the source side
  int gen;   // deck generator carrying it to its partner
};

struct Portal {
  int tri = -1;
  int local = -1;
  int side = -1;  // octagon side crossed when leaving through this edge
};

struct MeshLocation {
  int tri;
  HPoint point;  // reduced into the octagon
  Vec3 lambda;
  Mat2 deck;
  std::array<int, 4> exponents;
};

class SurfaceMesh {
 public:
  std::vector<HPoint> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<EdgeIdent> idents;

  // derived in finalize()
  int classes = 0;
  std::vector<int> vclass;
  std::vector<std::array<int, 4>> voffset;  // u(v) = U[class] + periods . offset
  std::vector<std::array<int, 3>> neighbours;  // across the edge opposite local vertex k
  std::vector<std::array<Portal, 3>> portals;
  std::vector<Eigen::Matrix3d> frame_inv;
  int boundary_edges = 0;
  int domain_edges = 0;

  SurfaceMesh(const RepPair& rep) : rep_(rep), reduce_(rep) {}

  static SurfaceMesh build(const RepPair& rep, int n = 24) {
    SurfaceMesh m(rep);
    m.n_ = n;
    HPoint o{0, 1};
    m.vertices.push_back(o);
    // ray[k][r]: point at fraction r/n from the centre towards vertex k
    std::vector<std::vector<int>> ray(8, std::vector<int>(n + 1, 0));
    for (int k = 0; k < 8; ++k)
      for (int r = 1; r <= n; ++r) {
        ray[k][r] = static_cast<int>(m.vertices.size());
        m.vertices.push_back(geodesic_point(o, octagon::vertex(k), double(r) / n));
      }
    m.up_.assign(8, std::vector<int>(n * n, -1));
    for (int k = 0; k < 8; ++k) {
      HPoint A = octagon::vertex((k + 7) % 8), B = octagon::vertex(k);
      std::vector<int> id((n + 1) * (n + 1), -1);
      auto at = [&](int i, int j) -> int& { return id[i * (n + 1) + j]; };
      for (int i = 0; i <= n; ++i)
        for (int j = 0; i + j <= n; ++j) {
          if (j == 0) {
            at(i, j) = ray[(k + 7) % 8][i];
          } else if (i == 0) {
            at(i, j) = ray[k][j];
          } else {
            HPoint q = geodesic_point(A, B, double(j) / (i + j));
            at(i, j) = static_cast<int>(m.vertices.size());
            m.vertices.push_back(geodesic_point(o, q, double(i + j) / n));
          }
        }
      for (int i = 0; i < n; ++i)
        for (int j = 0; i + j < n; ++j) {
          m.up_[k][i * n + j] = static_cast<int>(m.triangles.size());
          m.add_triangle(at(i, j), at(i + 1, j), at(i, j + 1));
          if (i + j < n - 1) m.add_triangle(at(i + 1, j), at(i + 1, j + 1), at(i, j + 1));
        }
    }
    m.find_boundary();
    // identifications on the four source sides
    for (const auto& [key, info] : m.boundary_) {
      int side = info.side;
      for (int g = 0; g < 4; ++g)
        if (octagon::source_side[g] == side) m.idents.push_back({key.first, key.second, g});
    }
    std::sort(m.idents.begin(), m.idents.end(), [](const EdgeIdent& x, const EdgeIdent& y) {
      return std::tie(x.gen, x.a, x.b) < std::tie(y.gen, y.a, y.b);
    });
    m.finalize();
    return m;
  }

  void write(std::ostream& os) const {
    os << "# genus-2 octagon mesh\n";
    char buf[128];
    for (const auto& v : vertices) {
      std::snprintf(buf, sizeof buf, "v %.17g %.17g\n", v.x, v.y);
      os << buf;
    }
    for (const auto& t : triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    for (const auto& e : idents) os << "e " << e.a << ' ' << e.b << ' ' << e.gen << '\n';
  }

  static SurfaceMesh read(std::istream& is, const RepPair& rep) {
    SurfaceMesh m(rep);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tag;
      if (!(ls >> tag) || tag[0] == '#') continue;
      bool ok = true;
      if (tag == "v") {
        HPoint p;
        ok = static_cast<bool>(ls >> p.x >> p.y) && p.y > 0;
        m.vertices.push_back(p);
      } else if (tag == "t") {
        std::array<int, 3> t;
        ok = static_cast<bool>(ls >> t[0] >> t[1] >> t[2]);
        m.triangles.push_back(t);
      } else if (tag == "e") {
        EdgeIdent e;
        ok = static_cast<bool>(ls >> e.a >> e.b >> e.gen) && e.gen >= 0 && e.gen < 4;
        m.idents.push_back(e);
      } else {
        ok = false;
      }
      std::string extra;
      if (!ok || (ls >> extra))
        throw GeometryError(ErrorKind::mesh_format, "bad mesh line " + std::to_string(lineno) + ": " + line);
    }
    int nv = static_cast<int>(m.vertices.size());
    for (const auto& t : m.triangles)
      for (int k : t)
        if (k < 0 || k >= nv) throw GeometryError(ErrorKind::mesh_format, "triangle index out of range");
    for (const auto& e : m.idents)
      if (e.a < 0 || e.a >= nv || e.b < 0 || e.b >= nv)
        throw GeometryError(ErrorKind::mesh_format, "identification index out of range");
    m.find_boundary();
    m.finalize();
    return m;
  }

  int euler_characteristic() const {
    int quotient_edges = domain_edges - boundary_edges / 2;
    return classes - quotient_edges + static_cast<int>(triangles.size());
  }

  // half-cotangent weight of the edge opposite local vertex k, from the
  // Euclidean triangle with the same hyperbolic side lengths
  std::array<double, 3> cotangent_weights(int t) const {
    const auto& tri = triangles[t];
    std::array<double, 3> len;
    for (int k = 0; k < 3; ++k) len[k] = hyp_distance(vertices[tri[(k + 1) % 3]], vertices[tri[(k + 2) % 3]]);
    double area = heron(len[0], len[1], len[2]);
    if (area <= 0) throw GeometryError(ErrorKind::singular_solve, "degenerate triangle");
    std::array<double, 3> w;
    for (int k = 0; k < 3; ++k) {
      double a = len[k], b = len[(k + 1) % 3], c = len[(k + 2) % 3];
      w[k] = 0.5 * (b * b + c * c - a * a) / (4 * area);
    }
    return w;
  }

  Eigen::SparseMatrix<double> laplacian() const {
    std::vector<Eigen::Triplet<double>> trip;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
      auto w = cotangent_weights(t);
      for (int k = 0; k < 3; ++k) {
        int i = vclass[triangles[t][(k + 1) % 3]], j = vclass[triangles[t][(k + 2) % 3]];
        trip.emplace_back(i, i, w[k]);
        trip.emplace_back(j, j, w[k]);
        trip.emplace_back(i, j, -w[k]);
        trip.emplace_back(j, i, -w[k]);
      }
    }
    Eigen::SparseMatrix<double> a(classes, classes);
    a.setFromTriplets(trip.begin(), trip.end());
    return a;
  }

  Vec3 barycentric(int t, const HPoint& p) const { return frame_inv[t] * hyperboloid(p); }

  MeshLocation locate(const HPoint& z) const {
    Reduced red = reduce_(z);
    int t = start_triangle(red.point);
    Vec3 P = hyperboloid(red.point);
    for (std::size_t step = 0; step < triangles.size(); ++step) {
      Vec3 lam = frame_inv[t] * P;
      int k;
      double lo = lam.minCoeff(&k);
      if (lo >= -1e-12 * lam.cwiseAbs().maxCoeff()) return {t, red.point, lam, red.deck, red.exponents};
      int next = neighbours[t][k];
      if (next < 0) {
        if (lo >= -1e-9) return {t, red.point, lam, red.deck, red.exponents};  // on the rim up to rounding
        break;  // the walk hit the rim from the wrong side
      }
      t = next;
    }
    // exhaustive fallback
    double best = -1e300;
    for (int c = 0; c < static_cast<int>(triangles.size()); ++c) {
      double lo = (frame_inv[c] * P).minCoeff();
      if (lo > best) {
        best = lo;
        t = c;
      }
    }
    if (best < -1e-9) throw GeometryError(ErrorKind::mesh_format, "point not covered by the mesh");
    return {t, red.point, frame_inv[t] * P, red.deck, red.exponents};
  }

  const RepPair& rep() const { return rep_; }
  const DomainReducer& reducer() const { return reduce_; }
  int resolution() const { return n_; }

 private:
  struct BoundaryInfo {
    int tri, local, side;
  };

  void add_triangle(int a, int b, int c) {
    const HPoint &p = vertices[a], &q = vertices[b], &r = vertices[c];
    double s = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    if (s < 0) std::swap(b, c);
    triangles.push_back({a, b, c});
  }

  static std::pair<int, int> key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

  int side_of(const HPoint& m) const {
    double d0 = cosh_distance(m, {0, 1});
    int best = -1;
    double gap = 1e300;
    for (int j = 0; j < 8; ++j) {
      double g = std::abs(cosh_distance(m, reduce_.neighbour_centre(j)) - d0);
      if (g < gap) {
        gap = g;
        best = j;
      }
    }
    return best;
  }

  void find_boundary() {
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> edge_tris;
    for (int t = 0; t < static_cast<int>(triangles.size()); ++t)
      for (int k = 0; k < 3; ++k)
        edge_tris[key(triangles[t][(k + 1) % 3], triangles[t][(k + 2) % 3])].push_back({t, k});
    neighbours.assign(triangles.size(), {-1, -1, -1});
    boundary_.clear();
    for (const auto& [e, list] : edge_tris) {
      if (list.size() == 2) {
        neighbours[list[0].first][list[0].second] = list[1].first;
        neighbours[list[1].first][list[1].second] = list[0].first;
      } else if (list.size() == 1) {
        HPoint mid = geodesic_point(vertices[e.first], vertices[e.second], 0.5);
        boundary_[e] = {list[0].first, list[0].second, side_of(mid)};
      } else {
        throw GeometryError(ErrorKind::mesh_format, "edge shared by more than two triangles");
      }
    }
    domain_edges = static_cast<int>(edge_tris.size());
    boundary_edges = static_cast<int>(boundary_.size());
  }

  int match_boundary_vertex(const HPoint& p) const {
    int best = -1;
    double bd = 1e300;
    for (int v : boundary_vertices_) {
      double d = hyp_distance(p, vertices[v]);
      if (d < bd) {
        bd = d;
        best = v;
      }
    }
    if (bd > 1e-8) throw GeometryError(ErrorKind::mesh_format, "no partner vertex within 1e-8");
    return best;
  }

  void finalize() {
    if (vertices.empty() || triangles.empty()) throw GeometryError(ErrorKind::mesh_format, "empty mesh");
    frame_inv.clear();
    for (const auto& t : triangles) {
      Eigen::Matrix3d m;
      m << hyperboloid(vertices[t[0]]), hyperboloid(vertices[t[1]]), hyperboloid(vertices[t[2]]);
      frame_inv.push_back(m.inverse());
    }
    std::vector<char> on_b(vertices.size(), 0);
    for (const auto& [e, info] : boundary_) on_b[e.first] = on_b[e.second] = 1;
    boundary_vertices_.clear();
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v)
      if (on_b[v]) boundary_vertices_.push_back(v);

    // union-find with abelian potentials: u(v) = u(root) + periods . pot[v]
    std::vector<int> parent(vertices.size());
    std::vector<std::array<int, 4>> pot(vertices.size(), {0, 0, 0, 0});
    for (std::size_t v = 0; v < parent.size(); ++v) parent[v] = static_cast<int>(v);
    std::function<int(int)> find = [&](int v) {
      if (parent[v] == v) return v;
      int r = find(parent[v]);
      if (parent[v] != r) {
        for (int k = 0; k < 4; ++k) pot[v][k] += pot[parent[v]][k];
        parent[v] = r;
      }
      return r;
    };
    auto unite = [&](int v, int w, const std::array<int, 4>& e) {
      int rv = find(v), rw = find(w);
      std::array<int, 4> want;
      for (int k = 0; k < 4; ++k) want[k] = pot[v][k] + e[k] - pot[w][k];
      if (rv == rw) {
        for (int k = 0; k < 4; ++k)
          if (want[k] != 0) throw GeometryError(ErrorKind::mesh_format, "inconsistent identifications");
        return;
      }
      parent[rw] = rv;
      pot[rw] = want;
    };
    std::map<std::pair<int, int>, int> covered;
    for (const auto& id : idents) {
      if (!boundary_.count(key(id.a, id.b)))
        throw GeometryError(ErrorKind::mesh_format, "identified edge is not on the boundary");
      const Mat2& g = rep_.deck[id.gen];
      int a2 = match_boundary_vertex(mobius(g, vertices[id.a]));
      int b2 = match_boundary_vertex(mobius(g, vertices[id.b]));
      if (!boundary_.count(key(a2, b2))) throw GeometryError(ErrorKind::mesh_format, "partner edge missing");
      covered[key(id.a, id.b)]++;
      covered[key(a2, b2)]++;
      std::array<int, 4> e{0, 0, 0, 0};
      e[id.gen] = 1;
      unite(id.a, a2, e);
      unite(id.b, b2, e);
    }
    for (const auto& [e, info] : boundary_)
      if (covered[e] != 1) throw GeometryError(ErrorKind::mesh_format, "boundary edge not identified exactly once");

    vclass.assign(vertices.size(), -1);
    voffset.assign(vertices.size(), {0, 0, 0, 0});
    std::map<int, int> root_class;
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
      int r = find(v);
      auto it = root_class.find(r);
      if (it == root_class.end()) it = root_class.emplace(r, static_cast<int>(root_class.size())).first;
      vclass[v] = it->second;
      voffset[v] = pot[v];
    }
    classes = static_cast<int>(root_class.size());

    // portals: leaving through side j lands on the paired side after s_j^-1
    portals.assign(triangles.size(), {});
    for (const auto& [e, info] : boundary_) {
      const Mat2& si = reduce_.side_inverse(info.side);
      int a2 = match_boundary_vertex(mobius(si, vertices[e.first]));
      int b2 = match_boundary_vertex(mobius(si, vertices[e.second]));
      auto it = boundary_.find(key(a2, b2));
      if (it == boundary_.end()) throw GeometryError(ErrorKind::mesh_format, "portal partner missing");
      portals[info.tri][info.local] = {it->second.tri, it->second.local, info.side};
    }

    // sector lookup for point location
    if (n_ == 0) n_ = 1;
    for (int k = 0; k < 8; ++k) {
      Eigen::Matrix3d m;
      m << hyperboloid({0, 1}), hyperboloid(octagon::vertex((k + 7) % 8)), hyperboloid(octagon::vertex(k));
      sector_inv_[k] = m.inverse();
    }
  }

  int start_triangle(const HPoint& p) const {
    Vec3 P = hyperboloid(p);
    int best = 0;
    double best_min = -1e300;
    Vec3 lam_best;
    for (int k = 0; k < 8; ++k) {
      Vec3 lam = sector_inv_[k] * P;
      if (lam.minCoeff() > best_min) {
        best_min = lam.minCoeff();
        best = k;
        lam_best = lam;
      }
    }
    if (up_.empty()) return 0;  // meshes read from file start anywhere and walk
    double s = lam_best.sum();
    int i = std::clamp(static_cast<int>(n_ * lam_best[1] / s), 0, n_ - 1);
    int j = std::clamp(static_cast<int>(n_ * lam_best[2] / s), 0, n_ - 1 - i);
    return up_[best][i * n_ + j];
  }

  RepPair rep_;
  DomainReducer reduce_;
  int n_ = 0;
  std::map<std::pair<int, int>, BoundaryInfo> boundary_;
  std::vector<int> boundary_vertices_;
  std::vector<std::vector<int>> up_;
  std::array<Eigen::Matrix3d, 8> sector_inv_;
};

// ---- harmonic 1-forms

class HarmonicForm {
 public:
  std::shared_ptr<const SurfaceMesh> mesh;
  std::array<double, 4> periods{0, 0, 0, 0};
  Eigen::VectorXd U;  // per vertex class
  double coclosed_residual = 0;

  double vertex_value(int v) const {
    double u = U[mesh->vclass[v]];
    for (int k = 0; k < 4; ++k) u += periods[k] * mesh->voffset[v][k];
    return u;
  }

  // cochain value on the oriented edge a -> b
  double edge_value(int a, int b) const { return vertex_value(b) - vertex_value(a); }

  double shift(const std::array<int, 4>& e) const {
    double s = 0;
    for (int k = 0; k < 4; ++k) s += periods[k] * e[k];
    return s;
  }

  // the multivalued primitive on H^2
  double value(const HPoint& z) const {
    MeshLocation loc = mesh->locate(z);
    Vec3 P = hyperboloid(loc.point);
    return alpha[loc.tri].dot(P) / beta[loc.tri].dot(P) + shift(loc.exponents);
  }

  // integral along the lifted loop of the word
  double period(const LoopWord& w) const {
    DomainPath p = DomainPath::lifted(w, mesh->rep());
    return value(p.end()) - value(p.start());
  }

  std::vector<Vec3> alpha, beta;  // u = alpha.P / beta.P on each triangle
};

inline HarmonicForm harmonic_one_form(std::shared_ptr<const SurfaceMesh> mesh, const std::array<double, 4>& periods) {
  HarmonicForm form;
  form.mesh = mesh;
  form.periods = periods;
  const SurfaceMesh& m = *mesh;
  Eigen::SparseMatrix<double> a = m.laplacian();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(m.classes);
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    auto w = m.cotangent_weights(t);
    for (int k = 0; k < 3; ++k) {
      int vi = m.triangles[t][(k + 1) % 3], vj = m.triangles[t][(k + 2) % 3];
      double d = 0;
      for (int g = 0; g < 4; ++g) d += periods[g] * (m.voffset[vi][g] - m.voffset[vj][g]);
      b[m.vclass[vi]] -= w[k] * d;
      b[m.vclass[vj]] += w[k] * d;
    }
  }
  // pin class 0
  int n = m.classes - 1;
  Eigen::SparseMatrix<double> red = a.bottomRightCorner(n, n);
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(red);
  if (solver.info() != Eigen::Success) throw GeometryError(ErrorKind::singular_solve, "Laplacian factorization failed");
  Eigen::VectorXd x = solver.solve(b.tail(n));
  if (solver.info() != Eigen::Success) throw GeometryError(ErrorKind::singular_solve, "Laplacian solve failed");
  form.U = Eigen::VectorXd::Zero(m.classes);
  form.U.tail(n) = x;
  form.coclosed_residual = (a * form.U - b).cwiseAbs().maxCoeff();
  for (int t = 0; t < static_cast<int>(m.triangles.size()); ++t) {
    Vec3 u(form.vertex_value(m.triangles[t][0]), form.vertex_value(m.triangles[t][1]),
           form.vertex_value(m.triangles[t][2]));
    form.alpha.push_back(m.frame_inv[t].transpose() * u);
    form.beta.push_back(m.frame_inv[t].transpose() * Vec3::Ones());
  }
  return form;
}

// ---- flow of X with Omega(X, .) = du on one factor

class MeshFlow {
 public:
  explicit MeshFlow(const HarmonicForm& form) : form_(form) {}

  struct State {
    int tri;
    Vec3 P;  // domain point on the hyperboloid
    Mat2 deck;
    std::array<int, 4> exponents;
    HPoint actual() const { return mobius(deck, from_hyperboloid(P)); }
  };

  State start(const HPoint& z) const {
    MeshLocation loc = form_.mesh->locate(z);
    return {loc.tri, hyperboloid(loc.point), loc.deck, loc.exponents};
  }

  // X in half-plane coordinates at z
  Eigen::Vector2d field(const HPoint& z) const {
    MeshLocation loc = form_.mesh->locate(z);
    Eigen::Vector2d x = local_field(loc.tri, loc.point);
    cplx d = mobius_derivative(loc.deck, loc.point.z()) * cplx(x[0], x[1]);
    return {d.real(), d.imag()};
  }

  // returns false if the point did not move
  bool advance(State& s, double time) const {
    const SurfaceMesh& m = *form_.mesh;
    double left = time;
    int zero_steps = 0;
    for (int iter = 0; iter < 200000; ++iter) {
      if (left <= 0) return iter > 0;
      const Vec3& al = form_.alpha[s.tri];
      const Vec3& be = form_.beta[s.tri];
      double b0 = be.dot(s.P);
      double c = al.dot(s.P) / b0;
      Vec3 wv = al - c * be;
      double nn = minkowski(wv, wv);
      if (nn <= 1e-300) return iter > 0;  // flat triangle: the point rests
      double norm = std::sqrt(nn);
      Vec3 e = direction(s.tri, s.P);
      double be_e = be.dot(e);
      Vec3 l0 = m.frame_inv[s.tri] * s.P, le = m.frame_inv[s.tri] * e;
      double sig = 1e300;
      int edge = -1;
      for (int k = 0; k < 3; ++k) {
        if (le[k] >= 0) continue;
        double r = std::max(l0[k], 0.0) / -le[k];
        if (r >= 1) continue;
        double sk = std::atanh(r);
        if (sk < sig) {
          sig = sk;
          edge = k;
        }
      }
      auto elapsed = [&](double sg) { return (std::sinh(sg) * b0 + (std::cosh(sg) - 1) * be_e) / norm; };
      if (edge < 0 || elapsed(sig) >= left) {
        double sg = left * norm / b0;
        for (int it = 0; it < 60; ++it) {
          double f = elapsed(sg) - left;
          double df = (std::cosh(sg) * b0 + std::sinh(sg) * be_e) / norm;
          double step = f / df;
          sg -= step;
          if (std::abs(step) < 1e-17 * (1 + sg)) break;
        }
        s.P = std::cosh(sg) * s.P + std::sinh(sg) * e;
        s.P /= std::sqrt(-minkowski(s.P, s.P));
        return true;
      }
      left -= elapsed(sig);
      s.P = std::cosh(sig) * s.P + std::sinh(sig) * e;
      s.P /= std::sqrt(-minkowski(s.P, s.P));
      zero_steps = sig < 1e-14 ? zero_steps + 1 : 0;
      if (zero_steps > 64) throw GeometryError(ErrorKind::step_bound, "flow stuck on a triangle edge");
      int next = m.neighbours[s.tri][edge];
      if (next >= 0) {
        s.tri = next;
        continue;
      }
      const Portal& p = m.portals[s.tri][edge];
      HPoint z = mobius(m.reducer().side_inverse(p.side), from_hyperboloid(s.P));
      s.P = hyperboloid(z);
      s.deck = s.deck * m.reducer().side(p.side);
      SideElement se = side_element(p.side);
      s.exponents[se.gen] += se.inverse ? -1 : 1;
      s.tri = p.tri;
    }
    throw GeometryError(ErrorKind::step_bound, "flow crossed too many triangles");
  }

  HPoint flow(const HPoint& z, double time) const {
    State s = start(z);
    return advance(s, time) ? s.actual() : z;
  }

 private:
  // X = y^2 (u_y, -u_x) at a domain point of triangle t
  Eigen::Vector2d local_field(int t, const HPoint& p) const {
    Vec3 P = hyperboloid(p);
    const Vec3& al = form_.alpha[t];
    const Vec3& be = form_.beta[t];
    double b0 = be.dot(P);
    Vec3 w = (al - (al.dot(P) / b0) * be) / b0;
    auto d = hyperboloid_d(p);
    double ux = w.dot(d[0]), uy = w.dot(d[1]);
    return {p.y * p.y * uy, -p.y * p.y * ux};
  }

  // unit tangent along X
  Vec3 direction(int t, const Vec3& P) const {
    HPoint p = from_hyperboloid(P);
    Eigen::Vector2d x = local_field(t, p);
    auto d = hyperboloid_d(p);
    Vec3 e = x[0] * d[0] + x[1] * d[1];
    e -= minkowski(e, P) / minkowski(P, P) * P;
    return e / std::sqrt(minkowski(e, e));
  }

  const HarmonicForm& form_;
};

// Lambda_t(x) = (x, Phi_{t D}(x)) with Phi the flow of the symplectic dual of theta
inline IsotopyPath closed_form_isotopy(const RepPair& rep, std::shared_ptr<const HarmonicForm> theta, double duration) {
  if (rep.cls != RepClass::diagonal)
    throw GeometryError(ErrorKind::unsupported_class, "closed-form isotopy needs the diagonal class");
  auto flow = std::make_shared<MeshFlow>(*theta);
  return {[flow, theta, duration](const HPoint& x, const std::vector<double>& ts) {
            std::vector<BiPoint> out;
            MeshFlow::State s = flow->start(x);
            double now = 0;
            for (double t : ts) {
              double target = t * duration;
              if (target < now) throw std::invalid_argument("sweep times must be ascending");
              flow->advance(s, target - now);
              now = target;
              out.push_back({x, s.actual()});
            }
            return out;
          },
          [flow, theta, duration](const BiPoint& b, double) {
            Eigen::Vector2d v = flow->field(b.right);
            return Vec4(0, 0, duration * v[0], duration * v[1]);
          }};
}

}  // namespace adsflux
