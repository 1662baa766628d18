#pragma once

// Monte-Carlo relaxation experiments: moments <|u_t|^(2p)>^(1/p) of the
// semigroup started from a local observable, power-law fits of their decay,
// and the trapping counterexample for laws violating the moment condition.
//
// Expectations over the environment are estimated by averaging |u_t(x)|^(2p)
// over all torus sites x (stationarity: u_t(x) has the law of u_t(tau_x a))
// and then over independent replicates.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/heat.hpp"

namespace rcm {

struct MomentEntry {
  double t = 0.0;
  // <|u_t|^(2p)>^(1/p) and its delta-method standard error.
  double moment = 0.0;
  double stderr_ = 0.0;
  // <|u_t|^(2p)> before the root.
  double raw = 0.0;
  double raw_stderr = 0.0;
};

struct MomentSeries {
  std::string observable;
  double p = 1.0;
  std::vector<MomentEntry> entries;
  std::size_t reps = 0;
  long L = 0;
  std::string law;
  std::uint64_t seed = 0;
};

struct RelaxationSpec {
  EnvironmentLaw law;
  long L = 16;
  LocalObservable observable;
  std::vector<double> p_list{1.0};
  EvolutionParams params;
  std::size_t reps = 2;
  std::uint64_t seed = 1;
  int threads = 1;
  // Subtract the spatial mean of g before evolving. The torus conserves
  // sum_x u_t(x), a mode absent on Z^d that would otherwise put a floor of
  // about Var(g)/L^d under every second moment.
  bool project_zero_mode = true;
};

struct RelaxationResult {
  std::vector<MomentSeries> series;  // one per entry of p_list
  std::vector<MomentVerdict> moment_condition;
  bool moment_condition_pass = false;
  std::optional<std::string> warning;
};

// Throws ValidationError for reps < 2 or p < 1/2.
RelaxationResult run_relaxation(const RelaxationSpec& spec);

struct DecayFit {
  // Positive decay rate: value ~ t^(-exponent).
  double exponent = 0.0;
  double stderr_ = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares of log(value) on log(t) over points with
// t_lo <= t <= t_hi. Needs at least 4 points, all positive.
DecayFit fit_power_law(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                       double t_hi);
DecayFit fit_decay(const MomentSeries& series, double t_lo, double t_hi);

struct ScaledPoint {
  double t = 0.0;
  double value = 0.0;
  double stderr_ = 0.0;
};

// S(t) = t^(d/2) <|u_t|^(2p)>^(1/p).
std::vector<ScaledPoint> scaled_statistic(const MomentSeries& series, int d);

struct NecessityConfig {
  // PowerLawNearZero exponent per direction.
  std::vector<double> theta;
  double q = 8.0;
  std::vector<double> times;
  long L = 32;
  double dt = 0.0;  // 0 selects the default 1/(4d)
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  int threads = 1;

  int dimension() const { return static_cast<int>(theta.size()); }
  // P(sup_i a(e_i) <= eps) = eps^(sum theta), so p0 = sum theta.
  double p0() const;
};

struct NecessityResult {
  std::vector<ScaledPoint> rows;
  double p0 = 0.0;
  // Moments of order q > 8 p0 / d contradict diffusive relaxation.
  double critical_q = 0.0;
  double growth_ratio = 0.0;
  bool growth_witnessed = false;
  bool moment_condition_fails = false;
  MomentSeries series;
};

// g is the centred conductance of (e_1, 2 e_1), an edge away from the origin.
NecessityResult necessity_experiment(const NecessityConfig& cfg);

// S(t_max) / S(t_min) >= 2.
bool growth_witnessed(const std::vector<ScaledPoint>& rows);

// For each series: raw moments non-increasing in t (relative slack 1e-12).
std::vector<bool> dissipation_check(const std::vector<MomentSeries>& series);

}  // namespace rcm
