#include "rcm/relaxation.hpp"

#include <cmath>

#include "rcm/error.hpp"
#include "rcm/parallel.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

std::string describe(const EnvironmentLaw& law) {
  std::string out;
  for (std::size_t i = 0; i < law.directions.size(); ++i) {
    if (i) out += ";";
    out += rcm::describe(law.directions[i]);
  }
  return out;
}

}  // namespace

RelaxationResult run_relaxation(const RelaxationSpec& spec) {
  validate(spec.law);
  if (spec.reps < 2) throw ValidationError("relaxation needs reps >= 2 for a standard error");
  if (spec.p_list.empty()) throw ValidationError("relaxation needs at least one moment order");
  for (double p : spec.p_list) {
    if (!(p >= 0.5)) throw ValidationError("moment orders p must be >= 1/2");
  }
  if (spec.params.steps.empty()) throw ValidationError("relaxation needs at least one output time");
  const TorusLattice lat = build_torus(spec.law.dimension(), spec.L);

  RelaxationResult result;
  std::vector<double> q_check;
  for (double p : spec.p_list) q_check.push_back(std::max(1.0, p));
  result.moment_condition = moment_condition_check(spec.law, q_check);
  result.moment_condition_pass = true;
  for (const auto& v : result.moment_condition) result.moment_condition_pass = result.moment_condition_pass && v.pass;
  result.warning = wraparound_warning(spec.params, lat);

  const std::size_t nt = spec.params.steps.size();
  const std::size_t np = spec.p_list.size();
  // raw[r][k * np + j]: spatial mean of |u_{t_k}|^(2 p_j) in replicate r.
  std::vector<std::vector<double>> raw(spec.reps, std::vector<double>(nt * np, 0.0));
  parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
    const Environment env = sample_environment(spec.law, lat, derive_seed(spec.seed, r));
    ScalarField g = evaluate_observable(spec.observable, env);
    if (spec.project_zero_mode) {
      const double m = pairwise_sum(g.values) / static_cast<double>(g.size());
      for (double& x : g.values) x -= m;
    }
    std::vector<double> powered(g.size());
    evolve_visit(Stencil(env), g, spec.params, [&](std::size_t k, const ScalarField& u) {
      for (std::size_t j = 0; j < np; ++j) {
        const double two_p = 2.0 * spec.p_list[j];
        for (Vertex x = 0; x < u.size(); ++x) {
          const double a = std::abs(u[x]);
          powered[x] = two_p == 2.0 ? a * a : std::pow(a, two_p);
        }
        raw[r][k * np + j] = pairwise_sum(powered) / static_cast<double>(powered.size());
      }
    });
  });

  for (std::size_t j = 0; j < np; ++j) {
    MomentSeries s;
    s.observable = spec.observable.describe();
    s.p = spec.p_list[j];
    s.reps = spec.reps;
    s.L = spec.L;
    s.law = describe(spec.law);
    s.seed = spec.seed;
    for (std::size_t k = 0; k < nt; ++k) {
      std::vector<double> samples(spec.reps);
      for (std::size_t r = 0; r < spec.reps; ++r) samples[r] = raw[r][k * np + j];
      const MeanStderr ms = mean_stderr(samples);
      MomentEntry e;
      e.t = spec.params.times[k];
      e.raw = ms.mean;
      e.raw_stderr = ms.stderr_;
      const double p = s.p;
      if (ms.mean > 0.0) {
        e.moment = std::pow(ms.mean, 1.0 / p);
        e.stderr_ = std::pow(ms.mean, 1.0 / p - 1.0) * ms.stderr_ / p;
      }
      s.entries.push_back(e);
    }
    result.series.push_back(std::move(s));
  }
  return result;
}

DecayFit fit_power_law(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                       double t_hi) {
  if (t.size() != value.size()) throw ValidationError("fit inputs differ in length");
  const double slack = 1e-9 * std::max(1.0, t_hi);
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo - slack || t[i] > t_hi + slack) continue;
    if (!(value[i] > 0.0) || !(t[i] > 0.0)) {
      throw ValidationError("power-law fit window contains a nonpositive value or time");
    }
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(value[i]));
  }
  if (xs.size() < 4) throw ValidationError("power-law fit needs at least 4 points in the window");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ValidationError("power-law fit window has a single distinct time");
  const double slope = sxy / sxx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double resid = ys[i] - (my + slope * (xs[i] - mx));
    sse += resid * resid;
  }
  DecayFit fit;
  fit.exponent = -slope;
  fit.stderr_ = xs.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.r2 = syy == 0.0 ? 1.0 : 1.0 - sse / syy;
  fit.points = xs.size();
  return fit;
}

DecayFit fit_decay(const MomentSeries& series, double t_lo, double t_hi) {
  std::vector<double> t, v;
  for (const auto& e : series.entries) {
    t.push_back(e.t);
    v.push_back(e.moment);
  }
  return fit_power_law(t, v, t_lo, t_hi);
}

std::vector<ScaledPoint> scaled_statistic(const MomentSeries& series, int d) {
  std::vector<ScaledPoint> out;
  for (const auto& e : series.entries) {
    const double scale = std::pow(e.t, 0.5 * d);
    out.push_back(ScaledPoint{e.t, scale * e.moment, scale * e.stderr_});
  }
  return out;
}

double NecessityConfig::p0() const {
  double s = 0.0;
  for (double th : theta) s += th;
  return s;
}

bool growth_witnessed(const std::vector<ScaledPoint>& rows) {
  if (rows.size() < 2) return false;
  const double first = rows.front().value;
  const double last = rows.back().value;
  if (!(first > 0.0)) return last > 0.0;
  return last / first >= 2.0;
}

NecessityResult necessity_experiment(const NecessityConfig& cfg) {
  const int d = cfg.dimension();
  if (d < 1) throw ValidationError("necessity experiment needs at least one direction");
  if (!(cfg.q >= 1.0)) throw ValidationError("necessity moment order q must be >= 1");
  if (cfg.times.size() < 2) throw ValidationError("necessity experiment needs a time ladder");
  if (cfg.times.front() <= 0.0) throw ValidationError("necessity time ladder must start after t = 0");
  EnvironmentLaw law;
  for (double th : cfg.theta) law.directions.push_back(PowerLawNearZero{th});
  validate(law);

  RelaxationSpec spec;
  spec.law = law;
  spec.L = cfg.L;
  spec.observable = centered_conductance(d);
  spec.p_list = {cfg.q};
  spec.params = make_evolution_params(d, cfg.dt > 0.0 ? cfg.dt : default_dt(d), cfg.times);
  spec.reps = cfg.reps;
  spec.seed = cfg.seed;
  spec.threads = cfg.threads;
  RelaxationResult run = run_relaxation(spec);

  NecessityResult out;
  out.p0 = cfg.p0();
  out.critical_q = 8.0 * out.p0 / d;
  out.moment_condition_fails = !run.moment_condition_pass;
  out.series = run.series.front();
  out.rows = scaled_statistic(out.series, d);
  const double first = out.rows.front().value;
  out.growth_ratio = first > 0.0 ? out.rows.back().value / first : 0.0;
  out.growth_witnessed = growth_witnessed(out.rows);
  return out;
}

std::vector<bool> dissipation_check(const std::vector<MomentSeries>& series) {
  std::vector<bool> out;
  for (const auto& s : series) {
    bool ok = true;
    for (std::size_t k = 1; k < s.entries.size(); ++k) {
      const double prev = s.entries[k - 1].raw;
      if (s.entries[k].raw > prev + 1e-12 * std::abs(prev)) ok = false;
    }
    out.push_back(ok);
  }
  return out;
}

}  // namespace rcm
