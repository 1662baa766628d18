#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "rcm/environment.hpp"
#include "rcm/error.hpp"
#include "rcm/random.hpp"

using namespace rcm;

namespace {

EnvironmentLaw iso(const ConductanceLaw& l, int d) { return EnvironmentLaw::isotropic(l, d); }

// Kolmogorov-Smirnov distance between the sample and a CDF.
double ks_distance(std::vector<double> xs, const ConductanceLaw& law) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = cdf(law, xs[i]);
    worst = std::max({worst, std::abs(F - static_cast<double>(i + 1) / n), std::abs(F - static_cast<double>(i) / n)});
  }
  return worst;
}

}  // namespace

TEST_CASE("degenerate laws") {
  const TorusLattice lat = build_torus(2, 8);
  const Environment one = sample_environment(iso(ConstantLaw{1.0}, 2), lat, 4);
  for (double a : one.conductances().values) CHECK(a == 1.0);
  const Environment b = sample_environment(iso(BernoulliLaw{1.0, 0.0, 0.3}, 2), lat, 4);
  for (double a : b.conductances().values) CHECK(a == 0.3);
}

TEST_CASE("Bernoulli empirical mean") {
  const TorusLattice lat = build_torus(2, 64);
  const Environment env = sample_environment(iso(BernoulliLaw{0.5, 0.0, 1.0}, 2), lat, 11);
  const double m = pairwise_sum(env.conductances().values) / static_cast<double>(lat.edge_count());
  CHECK(m >= 0.47);
  CHECK(m <= 0.53);
}

TEST_CASE("direction marginals match their laws") {
  const EnvironmentLaw law{{UniformLaw{0.2, 0.9}, PowerLawNearZero{0.25}, InverseShiftedExponentialLaw{1.0}}};
  const TorusLattice lat = build_torus(3, 16);
  const Environment env = sample_environment(law, lat, 2024);
  for (int i = 0; i < 3; ++i) {
    std::vector<double> xs;
    for (EdgeId e = 0; e < lat.edge_count(); ++e) {
      if (lat.direction(e) == i) xs.push_back(env[e]);
    }
    // 1% critical value of the one-sample KS statistic
    CHECK(ks_distance(xs, law[i]) < 1.63 / std::sqrt(static_cast<double>(xs.size())));
  }
}

TEST_CASE("law moments in closed form") {
  // Gompertz constant: int_0^inf e^-x / (1 + x) dx
  CHECK(mean(InverseShiftedExponentialLaw{1.0}) == doctest::Approx(0.596347362323194074).epsilon(1e-13));
  CHECK(mean(PowerLawNearZero{0.25}) == doctest::Approx(0.2));
  CHECK(variance(BernoulliLaw{0.5, 0.0, 1.0}) == doctest::Approx(0.25));
  CHECK(variance(UniformLaw{0.0, 1.0}) == doctest::Approx(1.0 / 12.0));
  // Monte-Carlo cross-check of the ISE variance
  Rng rng(9);
  double s = 0, s2 = 0;
  const int n = 400000;
  for (int k = 0; k < n; ++k) {
    const double a = draw(InverseShiftedExponentialLaw{2.0}, uniform01(rng));
    s += a;
    s2 += a * a;
  }
  const double m = s / n;
  CHECK(m == doctest::Approx(mean(InverseShiftedExponentialLaw{2.0})).epsilon(3e-3));
  CHECK(s2 / n - m * m == doctest::Approx(variance(InverseShiftedExponentialLaw{2.0})).epsilon(2e-2));
  CHECK(mean(InverseShiftedExponentialLaw{1000.0}) == doctest::Approx(1000.0 / 1001.0).epsilon(1e-5));
}

TEST_CASE("law validation") {
  CHECK_THROWS_AS(validate(ConstantLaw{0.0}), ValidationError);
  CHECK_THROWS_AS(validate(ConstantLaw{1.5}), ValidationError);
  CHECK_THROWS_AS(validate(BernoulliLaw{0.0, 0.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(validate(UniformLaw{0.5, 0.2}), ValidationError);
  CHECK_THROWS_AS(validate(PowerLawNearZero{-1.0}), ValidationError);
  CHECK_THROWS_AS(law_from_json(nlohmann::json{{"type", "uniform"}, {"low", 0.1}}), ValidationError);
  CHECK_THROWS_AS(law_from_json(nlohmann::json{{"type", "gaussian"}}), ValidationError);
  const ConductanceLaw l = law_from_json(to_json(ConductanceLaw{BernoulliLaw{0.3, 0.1, 0.8}}));
  CHECK(std::get<BernoulliLaw>(l).p == 0.3);
}

TEST_CASE("shift") {
  const TorusLattice lat = build_torus(1, 4);
  const Environment env(EdgeField(lat, {0.1, 0.2, 0.3, 0.4}), iso(UniformLaw{0, 1}, 1), 0);
  CHECK(shift(env, 1).conductances().values == std::vector<double>{0.2, 0.3, 0.4, 0.1});
  CHECK(shift(env, 0).conductances().values == env.conductances().values);

  const TorusLattice lat3 = build_torus(3, 5);
  const Environment r = sample_environment(iso(UniformLaw{0, 1}, 3), lat3, 8);
  const Vertex x = 38;
  CHECK(shift(shift(r, x), lat3.negate(x)).conductances().values == r.conductances().values);
}

TEST_CASE("resample one edge") {
  const TorusLattice lat = build_torus(2, 6);
  const Environment c = sample_environment(iso(ConstantLaw{0.7}, 2), lat, 1);
  CHECK(resample_edge(c, 5, 99).conductances().values == c.conductances().values);

  const EnvironmentLaw law{{BernoulliLaw{0.4, 0.2, 0.9}, UniformLaw{0.3, 0.6}}};
  const Environment env = sample_environment(law, lat, 3);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const EdgeId e = s % lat.edge_count();
    const Environment r = resample_edge(env, e, s);
    for (EdgeId b = 0; b < lat.edge_count(); ++b) {
      if (b != e) REQUIRE(r[b] == env[b]);
    }
    if (lat.direction(e) == 0) {
      CHECK((r[e] == 0.2 || r[e] == 0.9));
    } else {
      CHECK(r[e] >= 0.3);
      CHECK(r[e] <= 0.6);
    }
  }
}

TEST_CASE("moment condition") {
  SUBCASE("atom at zero") {
    const auto v = moment_condition_check(iso(BernoulliLaw{0.5, 0.0, 1.0}, 3), {1.0, 2.0});
    for (const auto& r : v) {
      CHECK_FALSE(r.pass);
      CHECK(r.reason == "P[sup = 0] > 0");
    }
  }
  SUBCASE("one direction of constant 1") {
    const EnvironmentLaw law{{BernoulliLaw{0.5, 0.0, 1.0}, ConstantLaw{1.0}}};
    for (const auto& r : moment_condition_check(law, {1.0, 4.0, 16.0})) {
      CHECK(r.pass);
      REQUIRE(r.value);
      CHECK(*r.value <= 1.0 + 1e-12);
    }
  }
  SUBCASE("Bernoulli with one inverse-shifted-exponential direction") {
    const EnvironmentLaw law{{BernoulliLaw{0.5, 0.0, 1.0}, BernoulliLaw{0.5, 0.0, 1.0},
                              InverseShiftedExponentialLaw{1.0}}};
    for (double q : {1.0, 2.0, 4.0, 8.0}) {
      // sup = 1 unless both Bernoullis vanish; then sup^-1 = 1 + E.
      const double exact = 0.75 + 0.25 * std::exp(1.0) * boost::math::tgamma(q + 1.0, 1.0);
      const auto v = moment_condition_check(law, {q});
      CHECK(v[0].pass);
      REQUIRE(v[0].value);
      CHECK(*v[0].value == doctest::Approx(exact).epsilon(1e-9));
    }
  }
  SUBCASE("power law tail") {
    // P(sup <= s) = s^2 so <sup^-1> = 2, and the q = 2 moment diverges.
    const auto v = moment_condition_check(iso(PowerLawNearZero{1.0}, 2), {1.0, 2.0});
    CHECK(v[0].pass);
    CHECK(*v[0].value == doctest::Approx(2.0).epsilon(1e-9));
    CHECK_FALSE(v[1].pass);
    const auto fails = moment_condition_check(iso(PowerLawNearZero{0.25}, 3), {1.0});
    CHECK_FALSE(fails[0].pass);
  }
  SUBCASE("Monte Carlo") {
    const auto ok = moment_condition_check(iso(PowerLawNearZero{2.0}, 2), {1.0}, MomentMethod::kMonteCarlo, 5);
    CHECK(ok[0].pass);
    CHECK(*ok[0].value == doctest::Approx(4.0 / 3.0).epsilon(5e-3));
    const auto bad = moment_condition_check(iso(PowerLawNearZero{0.25}, 2), {1.0}, MomentMethod::kMonteCarlo, 5);
    CHECK(bad[0].diverging);
    CHECK_FALSE(bad[0].pass);
  }
  CHECK_THROWS_AS(moment_condition_check(iso(ConstantLaw{1.0}, 2), {0.5}), ValidationError);
}

TEST_CASE("observables") {
  const TorusLattice lat = build_torus(2, 64);
  const Environment c = sample_environment(iso(ConstantLaw{0.4}, 2), lat, 1);
  for (double g : evaluate_observable(centered_conductance(2), c).values) CHECK(g == 0.0);

  const Environment b = sample_environment(iso(BernoulliLaw{0.5, 0.0, 1.0}, 2), lat, 17);
  const ScalarField g = evaluate_observable(centered_conductance(2), b);
  const double m = pairwise_sum(g.values) / static_cast<double>(g.size());
  CHECK(std::abs(m) <= 0.02);
  for (double x : g.values) CHECK(std::abs(x) <= 1.0);

  // g(x) reads the conductance of x + (e_1, 2 e_1)
  Coords one{};
  one[0] = 1;
  const Vertex x = 70;
  CHECK(g[x] == b[lat.edge(lat.translate(x, lat.vertex(one)), 0)] - 0.5);

  const Environment u = sample_environment(iso(UniformLaw{0.1, 1.0}, 2), lat, 2);
  const LocalObservable div = divergence_form(1, centered_conductance(2));
  CHECK(std::abs(pairwise_sum(evaluate_observable(div, u).values)) <= 1e-12);
  CHECK(div.support_size() == 1);

  const LocalObservable back = observable_from_json(to_json(div, 2), 2);
  CHECK(evaluate_observable(back, u).values == evaluate_observable(div, u).values);
  CHECK_THROWS(observable_from_json(nlohmann::json{{"type", "centered_conductance"}, {"typo", 1}}, 2));

  Coords far{};
  far[0] = 5;
  const TorusLattice small = build_torus(2, 4);
  const Environment s = sample_environment(iso(UniformLaw{0.1, 1.0}, 2), small, 2);
  CHECK_THROWS_AS(evaluate_observable(centered_conductance(far, 0), s), ValidationError);
}

TEST_CASE("environment serialization round trip") {
  const EnvironmentLaw law{{InverseShiftedExponentialLaw{1.0}, UniformLaw{0.25, 0.75}}};
  const Environment env = sample_environment(law, build_torus(2, 7), 123);
  std::stringstream ss;
  write_environment(ss, env);
  const Environment back = read_environment(ss);
  CHECK(back.lattice() == env.lattice());
  CHECK(back.seed() == 123);
  CHECK(back.conductances().values == env.conductances().values);

  std::stringstream bad("# rcm-environment {\"format_version\": 99}\n");
  CHECK_THROWS(read_environment(bad));
}

TEST_CASE("sampling is seed deterministic") {
  const TorusLattice lat = build_torus(3, 6);
  const auto law = iso(UniformLaw{0, 1}, 3);
  CHECK(sample_environment(law, lat, 5).conductances().values ==
        sample_environment(law, lat, 5).conductances().values);
  CHECK(sample_environment(law, lat, 5).conductances().values !=
        sample_environment(law, lat, 6).conductances().values);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
}
