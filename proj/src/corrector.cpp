#include "rcm/corrector.hpp"

#include <algorithm>
#include <cmath>

#include "rcm/error.hpp"
#include "rcm/parallel.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

ScalarField assemble_rhs(const Environment& env, int direction) {
  const TorusLattice& lat = env.lattice();
  if (direction < 0 || direction >= lat.dimension()) throw ValidationError("direction out of range");
  ScalarField rhs(lat);
  for (Vertex x = 0; x < lat.vertex_count(); ++x) {
    const Vertex down = lat.neighbor(x, direction, -1);
    rhs[x] = env[lat.edge(x, direction)] - env[lat.edge(down, direction)];
  }
  return rhs;
}

CorrectorSolution solve_massive_corrector(const Stencil& stencil, const ScalarField& rhs, int direction,
                                          double mu, const CorrectorOptions& options) {
  if (!(mu > 0.0)) throw ValidationError("corrector mass mu must be positive");
  if (!(options.tol > 0.0)) throw ValidationError("corrector tolerance must be positive");
  const std::size_t n = stencil.lattice().vertex_count();
  const long cap = options.max_iterations > 0 ? options.max_iterations : 10 * static_cast<long>(n);

  CorrectorSolution sol;
  sol.direction = direction;
  sol.mu = mu;
  sol.phi = ScalarField(stencil.lattice());
  const double rhs_norm = sup_norm(rhs.values);
  if (rhs_norm == 0.0) return sol;

  std::vector<double> inv_diag(n, 1.0);
  if (options.precondition) {
    for (std::size_t v = 0; v < n; ++v) inv_diag[v] = 1.0 / (mu + stencil.total_conductance()[v]);
  }
  std::vector<double>& x = sol.phi.values;
  std::vector<double> r = rhs.values;
  std::vector<double> z(n), p(n), Ap(n);
  for (std::size_t v = 0; v < n; ++v) z[v] = inv_diag[v] * r[v];
  p = z;
  double rz = dot(r, z);
  long it = 0;
  double res = 1.0;
  while (it < cap) {
    stencil.apply(p, mu, Ap);
    const double alpha = rz / dot(p, Ap);
    for (std::size_t v = 0; v < n; ++v) {
      x[v] += alpha * p[v];
      r[v] -= alpha * Ap[v];
    }
    ++it;
    res = sup_norm(r) / rhs_norm;
    if (res <= options.tol) {
      // Confirm against the true residual; recursion drift can hide error.
      stencil.apply(x, mu, Ap);
      for (std::size_t v = 0; v < n; ++v) r[v] = rhs.values[v] - Ap[v];
      res = sup_norm(r) / rhs_norm;
      if (res <= options.tol) break;
    }
    for (std::size_t v = 0; v < n; ++v) z[v] = inv_diag[v] * r[v];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t v = 0; v < n; ++v) p[v] = z[v] + beta * p[v];
  }
  sol.iterations = it;
  sol.residual = res;
  if (res > options.tol) {
    throw NonConvergedError("conjugate gradient hit the iteration cap of " + std::to_string(cap) +
                                " with relative residual " + std::to_string(res),
                            res, it);
  }
  return sol;
}

CorrectorSolution solve_massive_corrector(const Environment& env, int direction, double mu,
                                          const CorrectorOptions& options) {
  const ScalarField rhs = assemble_rhs(env, direction);
  return solve_massive_corrector(Stencil(env), rhs, direction, mu, options);
}

double EnergyBalance::relative_gap() const {
  const double scale = std::max(std::abs(energy), std::abs(work));
  return scale == 0.0 ? 0.0 : std::abs(energy - work) / scale;
}

EnergyBalance corrector_energy(const Environment& env, const CorrectorSolution& sol) {
  const ScalarField rhs = assemble_rhs(env, sol.direction);
  const EdgeField g = gradient(sol.phi);
  EnergyBalance out;
  std::vector<double> terms(g.size());
  for (EdgeId b = 0; b < g.size(); ++b) terms[b] = env[b] * g[b] * g[b];
  std::vector<double> sq(sol.phi.size()), work(sol.phi.size());
  for (Vertex x = 0; x < sol.phi.size(); ++x) {
    sq[x] = sol.phi[x] * sol.phi[x];
    work[x] = sol.phi[x] * rhs[x];
  }
  out.energy = sol.mu * pairwise_sum(sq) + pairwise_sum(terms);
  out.work = pairwise_sum(work);
  return out;
}

std::vector<CorrectorMomentRow> corrector_moment_sweep(const CorrectorSweepSpec& spec) {
  validate(spec.law);
  if (spec.mu_list.empty()) throw ValidationError("corrector sweep needs at least one mu");
  for (double mu : spec.mu_list) {
    if (!(mu > 0.0)) throw ValidationError("corrector sweep mu values must be positive");
  }
  for (double p : spec.p_list) {
    if (!(p > 0.0)) throw ValidationError("corrector sweep moment orders must be positive");
  }
  const TorusLattice lat = build_torus(spec.law.dimension(), spec.L);
  if (spec.direction < 0 || spec.direction >= lat.dimension()) throw ValidationError("direction out of range");
  const std::size_t nmu = spec.mu_list.size();
  const std::size_t np = spec.p_list.size();

  // per_rep[r][mu][p] = spatial mean of |phi|^p; NaN marks a failed solve.
  std::vector<std::vector<std::vector<double>>> per_rep(
      spec.reps, std::vector<std::vector<double>>(nmu, std::vector<double>(np, 0.0)));
  std::vector<std::vector<double>> gaps(spec.reps, std::vector<double>(nmu, 0.0));
  parallel_for(spec.reps, spec.threads, [&](std::size_t r) {
    const Environment env = sample_environment(spec.law, lat, derive_seed(spec.seed, r));
    const Stencil stencil(env);
    const ScalarField rhs = assemble_rhs(env, spec.direction);
    for (std::size_t m = 0; m < nmu; ++m) {
      try {
        const CorrectorSolution sol =
            solve_massive_corrector(stencil, rhs, spec.direction, spec.mu_list[m], spec.options);
        gaps[r][m] = corrector_energy(env, sol).relative_gap();
        for (std::size_t k = 0; k < np; ++k) {
          std::vector<double> powered(sol.phi.size());
          for (Vertex x = 0; x < sol.phi.size(); ++x) powered[x] = std::pow(std::abs(sol.phi[x]), spec.p_list[k]);
          per_rep[r][m][k] = pairwise_sum(powered) / static_cast<double>(powered.size());
        }
      } catch (const NonConvergedError&) {
        for (std::size_t k = 0; k < np; ++k) per_rep[r][m][k] = std::nan("");
      }
    }
  });

  std::vector<CorrectorMomentRow> rows;
  for (std::size_t m = 0; m < nmu; ++m) {
    for (std::size_t k = 0; k < np; ++k) {
      std::vector<double> samples;
      std::size_t failed = 0;
      double worst_gap = 0.0;
      for (std::size_t r = 0; r < spec.reps; ++r) {
        worst_gap = std::max(worst_gap, gaps[r][m]);
        const double v = per_rep[r][m][k];
        if (std::isnan(v)) {
          ++failed;
        } else {
          samples.push_back(v);
        }
      }
      const MeanStderr ms = mean_stderr(samples);
      CorrectorMomentRow row;
      row.mu = spec.mu_list[m];
      row.p = spec.p_list[k];
      row.reps_used = samples.size();
      row.nonconverged = failed;
      row.raw = ms.mean;
      row.max_energy_gap = worst_gap;
      const double p = spec.p_list[k];
      row.moment = ms.mean > 0.0 ? std::pow(ms.mean, 1.0 / p) : 0.0;
      // Delta method for M^(1/p).
      row.stderr_ = ms.mean > 0.0 ? std::pow(ms.mean, 1.0 / p - 1.0) * ms.stderr_ / p : 0.0;
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace rcm
