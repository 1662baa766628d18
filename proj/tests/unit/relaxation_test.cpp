#include <cmath>

#include "doctest.h"
#include "rcm/error.hpp"
#include "rcm/relaxation.hpp"

using namespace rcm;

namespace {

EnvironmentLaw iso(const ConductanceLaw& l, int d) { return EnvironmentLaw::isotropic(l, d); }

RelaxationSpec spec_for(const EnvironmentLaw& law, long L, std::vector<double> times) {
  RelaxationSpec s;
  s.law = law;
  s.L = L;
  s.observable = centered_conductance(law.dimension());
  s.params = make_evolution_params(law.dimension(), default_dt(law.dimension()), times);
  s.reps = 8;
  s.seed = 3;
  return s;
}

MomentSeries synthetic(double exponent, double scale = 1.0) {
  MomentSeries s;
  for (double t = 1.0; t <= 1024.0; t *= 2.0) {
    MomentEntry e;
    e.t = t;
    e.moment = e.raw = scale * std::pow(t, -exponent);
    s.entries.push_back(e);
  }
  return s;
}

}  // namespace

TEST_CASE("constant law gives a zero series") {
  RelaxationSpec s = spec_for(iso(ConstantLaw{0.5}, 2), 8, {0.0, 1.0, 4.0});
  s.p_list = {1.0, 2.0};
  const RelaxationResult r = run_relaxation(s);
  REQUIRE(r.series.size() == 2);
  for (const auto& series : r.series) {
    for (const auto& e : series.entries) CHECK(e.moment == 0.0);
  }
  for (bool ok : dissipation_check(r.series)) CHECK(ok);
  CHECK(r.moment_condition_pass);
}

TEST_CASE("t = 0 second moment is the conductance variance") {
  RelaxationSpec s = spec_for(iso(BernoulliLaw{0.5, 0.0, 1.0}, 2), 32, {0.0});
  s.reps = 20;
  const RelaxationResult r = run_relaxation(s);
  const MomentEntry& e = r.series[0].entries[0];
  CHECK(std::abs(e.moment - 0.25) <= 3.0 * e.stderr_ + 1e-3);
  CHECK_FALSE(r.moment_condition_pass);
}

TEST_CASE("moments dissipate") {
  const EnvironmentLaw law{{BernoulliLaw{0.5, 0.0, 1.0}, InverseShiftedExponentialLaw{1.0}}};
  RelaxationSpec s = spec_for(law, 16, log_spaced_times(0.5, 16.0, 8, true));
  s.p_list = {1.0, 2.0};
  s.project_zero_mode = false;
  const RelaxationResult r = run_relaxation(s);
  for (bool ok : dissipation_check(r.series)) CHECK(ok);
  for (const auto& e : r.series[0].entries) CHECK(e.moment >= 0.0);
}

TEST_CASE("thread count does not change results") {
  RelaxationSpec s = spec_for(iso(UniformLaw{0.1, 1.0}, 2), 12, {0.0, 2.0, 8.0});
  s.threads = 1;
  const RelaxationResult a = run_relaxation(s);
  s.threads = 4;
  const RelaxationResult b = run_relaxation(s);
  for (std::size_t k = 0; k < a.series[0].entries.size(); ++k) {
    CHECK(a.series[0].entries[k].moment == b.series[0].entries[k].moment);
    CHECK(a.series[0].entries[k].stderr_ == b.series[0].entries[k].stderr_);
  }
}

TEST_CASE("input validation") {
  RelaxationSpec s = spec_for(iso(UniformLaw{0.1, 1.0}, 2), 8, {1.0});
  s.reps = 1;
  CHECK_THROWS_AS(run_relaxation(s), ValidationError);
  s.reps = 2;
  s.p_list = {0.25};
  CHECK_THROWS_AS(run_relaxation(s), ValidationError);
}

TEST_CASE("power-law fits") {
  const DecayFit a = fit_decay(synthetic(1.5), 1.0, 1024.0);
  CHECK(a.exponent == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(a.r2 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.points == 11);
  CHECK(fit_decay(synthetic(1.0, 7.0), 4.0, 256.0).exponent == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_decay(synthetic(1.0), 4.0, 16.0), ValidationError);
  CHECK_THROWS_AS(fit_power_law({1, 2, 3, 4}, {1, 0, 1, 1}, 1, 4), ValidationError);
}

TEST_CASE("homogeneous on-diagonal decay in d = 2") {
  const Environment env = sample_environment(iso(ConstantLaw{1.0}, 2), build_torus(2, 64), 0);
  const auto series = on_diagonal_series(env, make_evolution_params(2, 0.125, log_spaced_times(20.0, 200.0, 10, false)));
  std::vector<double> t, p;
  for (const auto& pt : series) {
    t.push_back(pt.t);
    p.push_back(pt.p00);
  }
  CHECK(std::abs(fit_power_law(t, p, 20.0, 200.0).exponent - 1.0) <= 0.05);
}

TEST_CASE("scaled statistic and necessity helpers") {
  MomentSeries s = synthetic(1.0);
  const auto rows = scaled_statistic(s, 2);
  for (const auto& r : rows) CHECK(r.value == doctest::Approx(1.0));
  CHECK_FALSE(growth_witnessed(rows));
  const auto growing = scaled_statistic(synthetic(0.5), 2);
  CHECK(growth_witnessed(growing));

  MomentSeries up = synthetic(-0.5);
  CHECK(dissipation_check({up}) == std::vector<bool>{false});

  NecessityConfig cfg;
  cfg.theta = {0.25, 0.25, 0.25};
  CHECK(cfg.p0() == 0.75);
  cfg.L = 8;
  cfg.q = 8.0;
  cfg.times = {1.0, 2.0, 4.0};
  cfg.reps = 3;
  const NecessityResult r = necessity_experiment(cfg);
  CHECK(r.critical_q == doctest::Approx(2.0));
  CHECK(r.moment_condition_fails);
  for (const auto& row : r.rows) CHECK(row.value >= 0.0);
}
