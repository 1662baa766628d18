#include <random>

#include "doctest.h"
#include "rcm/error.hpp"
#include "rcm/lattice.hpp"

using namespace rcm;

TEST_CASE("torus counts") {
  CHECK(build_torus(1, 4).vertex_count() == 4);
  CHECK(build_torus(1, 4).edge_count() == 4);
  CHECK(build_torus(2, 3).vertex_count() == 9);
  CHECK(build_torus(2, 3).edge_count() == 18);
  CHECK(build_torus(3, 3).vertex_count() == 27);
  CHECK(build_torus(3, 3).edge_count() == 81);
  CHECK_THROWS_AS(build_torus(2, 2), ValidationError);
  CHECK_THROWS_AS(build_torus(0, 5), ValidationError);
  CHECK_THROWS_AS(build_torus(9, 3), ValidationError);
}

TEST_CASE("coordinates round trip and wrap") {
  const TorusLattice lat = build_torus(3, 5);
  for (Vertex v = 0; v < lat.vertex_count(); ++v) {
    CHECK(lat.vertex(lat.coords(v)) == v);
    for (int i = 0; i < 3; ++i) {
      CHECK(lat.neighbor(lat.neighbor(v, i, +1), i, -1) == v);
      Coords c = lat.coords(v);
      c[static_cast<std::size_t>(i)] += 1;
      CHECK(lat.neighbor(v, i, +1) == lat.vertex(c));
    }
    CHECK(lat.translate(v, lat.negate(v)) == 0);
  }
  // first coordinate is the slowest
  Coords c{};
  c[0] = 1;
  CHECK(lat.vertex(c) == 25);
  Coords m{};
  m[0] = -1;
  CHECK(lat.vertex(m) == lat.vertex(Coords{4}));
  CHECK(lat.distance2(lat.vertex(Coords{4, 1, 3})) == 1 + 1 + 4);
}

TEST_CASE("every vertex has 2d incident edges") {
  const TorusLattice lat = build_torus(2, 3);
  std::vector<int> degree(lat.vertex_count(), 0);
  for (EdgeId e = 0; e < lat.edge_count(); ++e) {
    CHECK(lat.lower(e) != lat.upper(e));
    ++degree[lat.lower(e)];
    ++degree[lat.upper(e)];
  }
  for (int k : degree) CHECK(k == 4);
}

TEST_CASE("gradient") {
  const TorusLattice lat = build_torus(1, 4);
  const EdgeField g = gradient(ScalarField(lat, {0, 1, 0, 0}));
  CHECK(g.values == std::vector<double>{1, -1, 0, 0});
  const EdgeField z = gradient(ScalarField(lat, 3.5));
  for (double x : z.values) CHECK(x == 0.0);

  const TorusLattice lat3 = build_torus(3, 4);
  const EdgeField h = gradient(indicator(lat3, 17));
  int nonzero = 0;
  for (double x : h.values) {
    if (x != 0.0) {
      ++nonzero;
      CHECK(std::abs(x) == 1.0);
    }
  }
  CHECK(nonzero == 6);
}

TEST_CASE("divergence and adjointness") {
  const TorusLattice lat = build_torus(2, 5);
  const ScalarField zero = divergence(EdgeField(lat));
  for (double x : zero.values) CHECK(x == 0.0);
  CHECK(divergence(gradient(indicator(lat, 7)))[7] == 4.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    ScalarField f(lat);
    EdgeField h(lat);
    for (auto& x : f.values) x = u(rng);
    for (auto& x : h.values) x = u(rng);
    const double lhs = dot(gradient(f).values, h.values);
    const double rhs = dot(f.values, divergence(h).values);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("generator") {
  const TorusLattice lat = build_torus(1, 4);
  const EdgeField ones(lat, 1.0);
  CHECK(apply_generator(ones, indicator(lat, 1)).values == std::vector<double>{-1, 2, -1, 0});
  CHECK(apply_generator(ones, indicator(lat, 0)).values == std::vector<double>{2, -1, 0, -1});
  for (double x : apply_generator(ones, ScalarField(lat, 2.0)).values) CHECK(x == 0.0);

  const TorusLattice lat2 = build_torus(2, 6);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  EdgeField a(lat2);
  for (auto& x : a.values) x = u(rng);
  ScalarField f(lat2), g(lat2);
  for (auto& x : f.values) x = u(rng) - 0.5;
  for (auto& x : g.values) x = u(rng) - 0.5;
  const ScalarField Af = apply_generator(a, f);
  CHECK(std::abs(pairwise_sum(Af.values)) <= 1e-12);
  // symmetric and positive semidefinite
  CHECK(std::abs(dot(Af.values, g.values) - dot(f.values, apply_generator(a, g).values)) <= 1e-12);
  CHECK(dot(Af.values, f.values) >= 0.0);
}

TEST_CASE("space-time weights") {
  CHECK(space_time_weight({2.0, 0.0}, 0.0) == 1.0);
  CHECK(space_time_weight({5.0, 17.0}, 0.0) == 1.0);
  const double w = space_time_weight({2.0, 0.0}, 3.0);
  CHECK(w * w == doctest::Approx(16.0).epsilon(1e-15));

  const TorusLattice lat = build_torus(2, 5);
  for (int power : {1, 2, 4}) {
    CHECK(weighted_sum(indicator(lat, 0), {3.0, 2.0}, power) == 1.0);
  }
  // |x|^2 = 1 at the four neighbours of 0: weight^2 = (1/(t+1) + 1)^alpha.
  ScalarField f(lat);
  f[lat.neighbor(0, 0)] = 2.0;
  CHECK(weighted_sum(f, {2.0, 1.0}, 2) == doctest::Approx(1.5 * 1.5 * 4.0));
  CHECK_THROWS_AS(weighted_sum(f, {2.0, 1.0}, 0), ValidationError);
}

TEST_CASE("fields reject mismatched or non-finite data") {
  const TorusLattice lat = build_torus(1, 4);
  CHECK_THROWS_AS(ScalarField(lat, std::vector<double>{1, 2}), ValidationError);
  CHECK_THROWS_AS(ScalarField(lat, std::vector<double>{1, 2, NAN, 0}), ValidationError);
  CHECK_THROWS_AS(EdgeField(lat, std::vector<double>{1, 2, 3}), ValidationError);
}

TEST_CASE("pairwise summation") {
  std::vector<double> v(1000, 0.1);
  CHECK(pairwise_sum(v) == doctest::Approx(100.0).epsilon(1e-14));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
