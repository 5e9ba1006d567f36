#pragma once

// Genus-2 surface group from the regular octagon with vertex angle pi/4,
// representations into PSL(2,R) x PSL(2,R), loop words and the Dirichlet
// fundamental domain centred at i.

#include <array>
#include <cctype>
#include <string>
#include <vector>

#include "adsflux/bundle_transport.hpp"

namespace adsflux {

namespace octagon {

// cosh of the inradius and circumradius for eight sides and angle pi/4
inline double cosh_inradius() { return 1.0 / std::tan(pi / 8); }
inline double cosh_circumradius() { return cosh_inradius() * cosh_inradius(); }
inline double inradius() { return std::acosh(cosh_inradius()); }
inline double circumradius() { return std::acosh(cosh_circumradius()); }

// side j has its midpoint in direction j*pi/4 from i (0 = up, counterclockwise)
inline HPoint side_midpoint(int j) { return mobius(rotation_about_i(j * pi / 4) * boost(inradius()), HPoint{0, 1}); }
// vertex k sits between sides k and k+1
inline HPoint vertex(int k) {
  return mobius(rotation_about_i((2 * k + 1) * pi / 8) * boost(circumradius()), HPoint{0, 1});
}

// isometry carrying side i onto side j, the octagon landing across side j
inline Mat2 side_pairing(int i, int j) {
  return rotation_about_i(j * pi / 4) * boost(2 * inradius()) * rotation_about_i(pi - i * pi / 4);
}

// a1: 2 -> 0, b1: 1 -> 3, a2: 6 -> 4, b2: 5 -> 7
inline constexpr std::array<int, 4> source_side{2, 1, 6, 5};
inline constexpr std::array<int, 4> target_side{0, 3, 4, 7};

inline std::array<Mat2, 4> generators() {
  std::array<Mat2, 4> g;
  for (int k = 0; k < 4; ++k) g[k] = side_pairing(source_side[k], target_side[k]);
  return g;
}

}  // namespace octagon

enum class RepClass { diagonal, conjugate, general };

inline std::string to_string(RepClass c) {
  switch (c) {
    case RepClass::diagonal: return "diagonal";
    case RepClass::conjugate: return "conjugate";
    case RepClass::general: return "general";
  }
  return "?";
}

struct RepPair {
  std::array<IsomPair, 4> gens;  // images of a1, b1, a2, b2
  RepClass cls = RepClass::general;
  GroupElt beta = GroupElt::identity();  // conjugate class: rho_r = beta rho_l beta^-1
  HPoint base{0, 1};
  std::array<Mat2, 4> deck = octagon::generators();  // deck group of the domain
};

inline Mat2 commutator(const Mat2& a, const Mat2& b) { return a * b * sl2_inverse(a) * sl2_inverse(b); }

inline double relator_residual(const RepPair& r) {
  auto res = [&](auto pick) {
    Mat2 m = commutator(pick(0), pick(1)) * commutator(pick(2), pick(3));
    return psl_distance(m, Mat2::Identity());
  };
  double l = res([&](int k) { return r.gens[k].left.matrix(); });
  double rr = res([&](int k) { return r.gens[k].right.matrix(); });
  double d = res([&](int k) { return r.deck[k]; });
  return std::max({l, rr, d});
}

// generators and their pairwise products (with inverses) are hyperbolic in both factors
inline bool is_fuchsian(const RepPair& r, double margin = 1e-6) {
  std::vector<Mat2> els;
  for (const auto& g : r.gens)
    for (const Mat2& m : {g.left.matrix(), g.right.matrix()}) els.push_back(m);
  auto hyperbolic = [&](const Mat2& m) { return std::abs(m.trace()) > 2 + margin; };
  for (const auto& m : els)
    if (!hyperbolic(m)) return false;
  for (int side = 0; side < 2; ++side)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        auto pick = [&](int k) { return side ? r.gens[k].right.matrix() : r.gens[k].left.matrix(); };
        if (!hyperbolic(pick(i) * pick(j)) || !hyperbolic(pick(i) * sl2_inverse(pick(j)))) return false;
      }
  return true;
}

inline RepPair octagon_rep() {
  RepPair r;
  r.deck = octagon::generators();
  for (int k = 0; k < 4; ++k) r.gens[k] = {GroupElt(r.deck[k]), GroupElt(r.deck[k])};
  r.cls = RepClass::diagonal;
  r.base = {0, 1};
  return r;
}

inline RepPair conjugate_rep(const RepPair& base, const GroupElt& beta) {
  if (base.cls != RepClass::diagonal)
    throw GeometryError(ErrorKind::unsupported_class, "conjugate_rep needs a diagonal base");
  RepPair r = base;
  const Mat2& b = beta.matrix();
  for (auto& g : r.gens) g.right = GroupElt(b * g.left.matrix() * sl2_inverse(b));
  r.beta = beta;
  r.cls = psl_distance(beta, GroupElt::identity()) < 1e-14 ? RepClass::diagonal : RepClass::conjugate;
  return r;
}

inline RepPair general_rep(const std::array<IsomPair, 4>& gens, double tol = 1e-9) {
  RepPair r;
  r.gens = gens;
  r.cls = RepClass::general;
  if (relator_residual(r) > tol)
    throw GeometryError(ErrorKind::unsupported_class, "generators violate the surface relator");
  return r;
}

// ---- loop words

struct Letter {
  int gen;  // 0..3 for a1, b1, a2, b2
  bool inverse;
};

class LoopWord {
 public:
  std::vector<Letter> letters;

  LoopWord() = default;
  explicit LoopWord(std::vector<Letter> l) : letters(std::move(l)) {}

  // "a1 b1^-1 A2 b2": capitals or ^-1 invert
  static LoopWord parse(const std::string& s) {
    LoopWord w;
    std::size_t i = 0;
    while (i < s.size()) {
      char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '.') {
        ++i;
        continue;
      }
      char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if ((lc != 'a' && lc != 'b') || i + 1 >= s.size() || (s[i + 1] != '1' && s[i + 1] != '2'))
        throw std::invalid_argument("bad loop word: " + s);
      int gen = (lc == 'a' ? 0 : 1) + (s[i + 1] == '2' ? 2 : 0);
      bool inv = std::isupper(static_cast<unsigned char>(c));
      i += 2;
      if (s.compare(i, 3, "^-1") == 0) {
        inv = !inv;
        i += 3;
      }
      w.letters.push_back({gen, inv});
    }
    if (w.letters.empty()) throw std::invalid_argument("empty loop word");
    return w;
  }

  static LoopWord generator(int k) { return LoopWord({{k, false}}); }

  std::string str() const {
    static const char* names[] = {"a1", "b1", "a2", "b2"};
    std::string s;
    for (const auto& l : letters) {
      if (!s.empty()) s += ' ';
      s += names[l.gen];
      if (l.inverse) s += "^-1";
    }
    return s;
  }

  LoopWord operator*(const LoopWord& o) const {
    LoopWord w = *this;
    w.letters.insert(w.letters.end(), o.letters.begin(), o.letters.end());
    return w;
  }

  // abelianized exponents
  std::array<int, 4> exponents() const {
    std::array<int, 4> e{0, 0, 0, 0};
    for (const auto& l : letters) e[l.gen] += l.inverse ? -1 : 1;
    return e;
  }

  Mat2 deck(const RepPair& r) const {
    Mat2 m = Mat2::Identity();
    for (const auto& l : letters) m = m * (l.inverse ? sl2_inverse(r.deck[l.gen]) : r.deck[l.gen]);
    return m;
  }

  IsomPair image(const RepPair& r) const {
    IsomPair p = IsomPair::identity();
    for (const auto& l : letters) p = p * (l.inverse ? r.gens[l.gen].inverse() : r.gens[l.gen]);
    return p;
  }

  // vertices x0, g1 x0, g1 g2 x0, ... of the lifted loop
  std::vector<HPoint> lifted_vertices(const RepPair& r) const {
    std::vector<HPoint> v{r.base};
    Mat2 m = Mat2::Identity();
    for (const auto& l : letters) {
      m = m * (l.inverse ? sl2_inverse(r.deck[l.gen]) : r.deck[l.gen]);
      v.push_back(mobius(m, r.base));
    }
    return v;
  }
};

// path in the domain H^2, geodesic segments
struct DomainPath {
  std::vector<std::pair<HPoint, HPoint>> segments;

  static DomainPath lifted(const LoopWord& w, const RepPair& r) {
    DomainPath p;
    auto v = w.lifted_vertices(r);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) p.segments.push_back({v[i], v[i + 1]});
    return p;
  }

  HPoint point(std::size_t seg, double s) const {
    return geodesic_point(segments[seg].first, segments[seg].second, s);
  }
  Eigen::Vector2d velocity(std::size_t seg, double s) const {
    return geodesic_velocity(segments[seg].first, segments[seg].second, s);
  }
  HPoint start() const { return segments.front().first; }
  HPoint end() const { return segments.back().second; }
};

// ---- fundamental domain

// deck element across side j of the octagon: j = 0,2 -> a1^{+-1}, 3,1 -> b1^{+-1}, 4,6 -> a2^{+-1}, 7,5 -> b2^{+-1}
struct SideElement {
  int gen;
  bool inverse;
};

inline SideElement side_element(int j) {
  static const SideElement t[8] = {{0, false}, {1, true}, {0, true}, {1, false},
                                   {2, false}, {3, true}, {2, true}, {3, false}};
  return t[j];
}

struct Reduced {
  HPoint point;  // in the closed octagon
  Mat2 deck = Mat2::Identity();  // original = deck . point
  std::array<int, 4> exponents{0, 0, 0, 0};  // abelianized word of deck
  std::vector<Letter> word;
};

// Dirichlet reduction: step across the side whose neighbour centre is closer
class DomainReducer {
 public:
  explicit DomainReducer(const RepPair& r) {
    for (int j = 0; j < 8; ++j) {
      SideElement e = side_element(j);
      side_[j] = e.inverse ? sl2_inverse(r.deck[e.gen]) : r.deck[e.gen];
      side_inv_[j] = sl2_inverse(side_[j]);
      centre_[j] = mobius(side_[j], HPoint{0, 1});
    }
  }

  Reduced operator()(const HPoint& z, int max_steps = 200) const {
    Reduced out;
    out.point = z;
    for (int step = 0; step < max_steps; ++step) {
      double d0 = cosh_distance(out.point, {0, 1});
      int best = -1;
      double best_d = d0 * (1 - 1e-13);
      for (int j = 0; j < 8; ++j) {
        double dj = cosh_distance(out.point, centre_[j]);
        if (dj < best_d) {
          best_d = dj;
          best = j;
        }
      }
      if (best < 0) return out;
      out.point = mobius(side_inv_[best], out.point);
      out.deck = out.deck * side_[best];
      SideElement e = side_element(best);
      out.exponents[e.gen] += e.inverse ? -1 : 1;
      out.word.push_back({e.gen, e.inverse});
    }
    throw GeometryError(ErrorKind::step_bound, "domain reduction did not terminate");
  }

  const Mat2& side(int j) const { return side_[j]; }
  const Mat2& side_inverse(int j) const { return side_inv_[j]; }
  const HPoint& neighbour_centre(int j) const { return centre_[j]; }

 private:
  std::array<Mat2, 8> side_, side_inv_;
  std::array<HPoint, 8> centre_;
};

inline Reduced reduce_to_domain(const RepPair& r, const HPoint& z) { return DomainReducer(r)(z); }

struct GroupElement {
  Mat2 deck;
  IsomPair rho;
  std::array<int, 4> exponents;
};

// elements gamma with d(gamma i, i) <= radius, by breadth-first search over side elements
inline std::vector<GroupElement> group_ball(const RepPair& r, double radius) {
  std::vector<GroupElement> out{{Mat2::Identity(), IsomPair::identity(), {0, 0, 0, 0}}};
  std::vector<std::size_t> frontier{0};
  double cr = std::cosh(radius);
  while (!frontier.empty()) {
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier)
      for (int j = 0; j < 8; ++j) {
        SideElement e = side_element(j);
        const GroupElement& g = out[idx];
        Mat2 m = g.deck * (e.inverse ? sl2_inverse(r.deck[e.gen]) : r.deck[e.gen]);
        if (cosh_distance(mobius(m, HPoint{0, 1}), {0, 1}) > cr) continue;
        bool seen = false;
        for (const auto& h : out)
          if (psl_distance(h.deck, m) < 1e-8) {
            seen = true;
            break;
          }
        if (seen) continue;
        GroupElement n{m, g.rho * (e.inverse ? r.gens[e.gen].inverse() : r.gens[e.gen]), g.exponents};
        n.exponents[e.gen] += e.inverse ? -1 : 1;
        out.push_back(n);
        next.push_back(out.size() - 1);
      }
    frontier = std::move(next);
  }
  return out;
}

}  // namespace adsflux
