#include <gtest/gtest.h>

#include <random>

#include "adsflux/isotopy.hpp"
#include "test_support.hpp"

using namespace adsflux;
namespace fx = adsflux::fixtures;

namespace {

HPoint near_i(double angle, double dist) { return mobius(rotation_about_i(angle) * boost(dist), HPoint{0, 1}); }

HamiltonianSpec left_bump_spec() {
  HamiltonianSpec h;
  h.left_bumps.push_back({near_i(0.3, 0.4), {0.08, 1.0}});
  return h;
}

HamiltonianSpec mixed_spec() {
  HamiltonianSpec h;
  h.left_bumps.push_back({near_i(0.3, 0.4), {0.08, 1.0}});
  h.right_bumps.push_back({near_i(2.5, 0.4), {0.06, 1.0}});
  h.distance_amplitude = 0.05;
  h.distance_width = 0.5;
  return h;
}

// (x, G(x)) with G the time-1 gradient flow of an invariant bump: equivariant, not Lagrangian
EquivMap gradient_flow_graph(const RepPair& rep) {
  auto bump = std::make_shared<OrbitBump>(rep, near_i(1.0, 0.4), BumpProfile{0.3, 1.0});
  VectorField grad = [bump](const BiPoint& b) {
    Eigen::Vector2d g = bump->gradient(b.right) * (b.right.y * b.right.y);
    return Vec4(0, 0, g[0], g[1]);
  };
  return {[grad](const HPoint& x) { return rk4_sweep(grad, {x, x}, 1.0, {1.0}, 1e-2)[0]; }, {}};
}

std::vector<HPoint> samples(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> ua(0, 2 * pi), ur(0, 1.7);
  std::vector<HPoint> out;
  for (int k = 0; k < n; ++k) out.push_back(near_i(ua(rng), ur(rng)));
  return out;
}

}  // namespace

TEST(Flux, ConstantFamilyIsZero) {
  RepPair r = octagon_rep();
  IsotopyPath c = constant_path(diagonal_map());
  for (int k = 0; k < 4; ++k) EXPECT_EQ(flux(c, LoopWord::generator(k), r), 0.0);
}

TEST(Flux, AdditiveReversedHomomorphism) {
  RepPair r = octagon_rep();
  EquivMap g = gradient_flow_graph(r);
  IsotopyPath a = geodesic_interpolation(diagonal_map(), g);
  IsotopyPath b = geodesic_interpolation(g, diagonal_map());
  LoopWord w = LoopWord::generator(0);
  double fa = flux(a, w, r), fb = flux(b, w, r);
  EXPECT_GT(std::abs(fa), 1e-3);  // the family is not trivial
  EXPECT_NEAR(flux(reversed(a), w, r), -fa, 1e-9);
  EXPECT_NEAR(flux(concatenate(a, b), w, r), fa + fb, 1e-9);
  double f1 = flux(a, LoopWord::generator(1), r);
  EXPECT_NEAR(flux(a, LoopWord::parse("a1 b1"), r), fa + f1, 1e-6);
  EXPECT_NEAR(flux(a, LoopWord::parse("a1^-1"), r), -fa, 1e-6);
}

TEST(Hamiltonian, TrivialCases) {
  RepPair r = octagon_rep();
  std::mt19937_64 rng(1);
  EquivMap start = geodesic_interpolation(diagonal_map(), gradient_flow_graph(r)).at_time(0.5);
  IsotopyPath zero_time = hamiltonian_isotopy(r, mixed_spec(), 0.0, start);
  HamiltonianSpec flat;
  flat.left_bumps.push_back({near_i(0.3, 0.4), {0.0, 1.0}});
  IsotopyPath flat_path = hamiltonian_isotopy(r, flat, 0.5, start);
  for (const auto& x : samples(rng, 10)) {
    EXPECT_EQ(bi_distance(zero_time.at(x, 1.0), start.eval(x)), 0.0);
    EXPECT_EQ(bi_distance(flat_path.at(x, 1.0), start.eval(x)), 0.0);
  }
  EXPECT_THROW(InvariantHamiltonian(general_rep(r.gens), mixed_spec()), GeometryError);
}

TEST(Hamiltonian, GradientMatchesValue) {
  std::mt19937_64 rng(2);
  RepPair r = conjugate_rep(octagon_rep(), GroupElt(fx::random_sl2(rng)));
  InvariantHamiltonian h(r, mixed_spec());
  for (int k = 0; k < 30; ++k) {
    BiPoint b{near_i(k, 0.05 * k), mobius(r.beta, near_i(k + 0.2, 0.05 * k + 0.1))};
    Vec4 fd;
    for (int i = 0; i < 4; ++i) {
      Vec4 e = Vec4::Zero();
      e[i] = 1e-6;
      fd[i] = (h.value(BiPoint::from(b.vec() + e)) - h.value(BiPoint::from(b.vec() - e))) / 2e-6;
    }
    EXPECT_LT((fd - h.gradient(b)).norm(), 1e-7);
    // invariance under the representation
    for (int g = 0; g < 4; ++g) EXPECT_NEAR(h.value(act(r.gens[g], b)), h.value(b), 1e-12);
  }
}

TEST(Hamiltonian, StaysLagrangianAndEquivariant) {
  RepPair r = octagon_rep();
  std::mt19937_64 rng(3);
  for (const auto& spec : {left_bump_spec(), mixed_spec()}) {
    IsotopyPath p = hamiltonian_isotopy(r, spec, 0.5, diagonal_map(), 1e-3);
    EquivMap end = p.at_time(1.0);
    auto xs = samples(rng, 40);
    double worst = 0;
    for (const auto& x : xs) worst = std::max(worst, lagrangian_defect(end, x));
    EXPECT_LE(worst, 1e-5);
    EXPECT_LE(equivariance_residual(end, r, std::vector<HPoint>(xs.begin(), xs.begin() + 10)), 1e-8);
    // and it actually moved
    EXPECT_GT(bi_distance(end.eval(near_i(0.3, 0.9)), {near_i(0.3, 0.9), near_i(0.3, 0.9)}), 1e-3);
  }
}

TEST(Hamiltonian, FluxVanishes) {
  RepPair r = octagon_rep();
  IsotopyPath p = hamiltonian_isotopy(r, mixed_spec(), 0.5, diagonal_map(), 1e-3);
  for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(flux(p, LoopWord::generator(k), r)), 1e-5) << k;
}

TEST(Hamiltonian, ConjugateClassFluxVanishes) {
  std::mt19937_64 rng(4);
  RepPair r = conjugate_rep(octagon_rep(), GroupElt(fx::random_sl2(rng)));
  IsotopyPath p = hamiltonian_isotopy(r, mixed_spec(), 0.3, conjugate_graph(r.beta), 1e-3);
  EXPECT_LE(equivariance_residual(p.at_time(1.0), r, {near_i(0.1, 0.3), near_i(2.0, 1.1)}), 1e-8);
  for (int k = 0; k < 4; ++k) EXPECT_LE(std::abs(flux(p, LoopWord::generator(k), r)), 1e-5) << k;
}
