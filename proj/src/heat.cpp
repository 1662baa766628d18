#include "rcm/heat.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rcm/error.hpp"

namespace rcm {

Stencil::Stencil(const Environment& env) : Stencil(env.conductances()) {}

Stencil::Stencil(const EdgeField& a) : lattice_(a.lattice), degree_(2 * a.lattice.dimension()) {
  const std::size_t n = lattice_.vertex_count();
  const int d = lattice_.dimension();
  const auto deg = static_cast<std::size_t>(degree_);
  neighbors_.resize(n * deg);
  weights_.resize(n * deg);
  diag_.assign(n, 0.0);
  for (Vertex v = 0; v < n; ++v) {
    double total = 0.0;
    for (int i = 0; i < d; ++i) {
      const Vertex up = lattice_.neighbor(v, i, +1);
      const Vertex down = lattice_.neighbor(v, i, -1);
      const std::size_t k = v * deg + 2 * static_cast<std::size_t>(i);
      neighbors_[k] = up;
      weights_[k] = a[lattice_.edge(v, i)];
      neighbors_[k + 1] = down;
      weights_[k + 1] = a[lattice_.edge(down, i)];
      total += weights_[k] + weights_[k + 1];
    }
    diag_[v] = total;
  }
}

void Stencil::euler_step(const std::vector<double>& f, double dt, std::vector<double>& out) const {
  const std::size_t n = lattice_.vertex_count();
  const auto deg = static_cast<std::size_t>(degree_);
  out.resize(n);
  const std::size_t* nb = neighbors_.data();
  const double* w = weights_.data();
  for (std::size_t v = 0; v < n; ++v, nb += deg, w += deg) {
    double acc = 0.0;
    for (std::size_t k = 0; k < deg; ++k) acc += w[k] * f[nb[k]];
    out[v] = (1.0 - dt * diag_[v]) * f[v] + dt * acc;
  }
}

void Stencil::apply(const std::vector<double>& f, double mass, std::vector<double>& out) const {
  const std::size_t n = lattice_.vertex_count();
  const auto deg = static_cast<std::size_t>(degree_);
  out.resize(n);
  const std::size_t* nb = neighbors_.data();
  const double* w = weights_.data();
  for (std::size_t v = 0; v < n; ++v, nb += deg, w += deg) {
    double acc = 0.0;
    for (std::size_t k = 0; k < deg; ++k) acc += w[k] * f[nb[k]];
    out[v] = (mass + diag_[v]) * f[v] - acc;
  }
}

EvolutionParams make_evolution_params(int d, double dt, const std::vector<double>& times) {
  if (!(dt > 0.0)) throw ValidationError("time step dt must be positive");
  if (dt > 1.0 / (2.0 * d) * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "time step dt = " << dt << " violates the stability bound dt <= 1/(2d) = "
       << 1.0 / (2.0 * d);
    throw StabilityError(os.str());
  }
  EvolutionParams p;
  p.dt = dt;
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("output times must be finite and >= 0");
    const long n = std::lround(t / dt);
    if (!p.steps.empty() && n <= p.steps.back()) {
      throw ValidationError("output times must be strictly increasing after snapping to the dt grid");
    }
    p.steps.push_back(n);
    p.times.push_back(static_cast<double>(n) * dt);
  }
  return p;
}

std::vector<double> log_spaced_times(double t_lo, double t_hi, int count, bool include_zero) {
  if (!(t_lo > 0.0 && t_hi >= t_lo && count >= 1)) {
    throw ValidationError("log-spaced grid needs 0 < t_lo <= t_hi and count >= 1");
  }
  std::vector<double> out;
  if (include_zero) out.push_back(0.0);
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    out.push_back(t_lo * std::pow(t_hi / t_lo, frac));
  }
  return out;
}

std::optional<std::string> wraparound_warning(const EvolutionParams& params, const TorusLattice& lattice) {
  const double limit = std::pow(static_cast<double>(lattice.side()) / 4.0, 2);
  if (params.t_max() <= limit) return std::nullopt;
  std::ostringstream os;
  os << "t_max = " << params.t_max() << " exceeds (L/4)^2 = " << limit
     << "; periodic wrap-around may bias results";
  return os.str();
}

ScalarField euler_step(const Environment& env, const ScalarField& f, double dt) {
  if (!(f.lattice == env.lattice())) throw LatticeMismatch();
  const int d = env.lattice().dimension();
  if (!(dt > 0.0) || dt > 1.0 / (2.0 * d) * (1.0 + 1e-12)) {
    throw StabilityError("time step violates dt <= 1/(2d)");
  }
  Stencil stencil(env);
  ScalarField out(f.lattice);
  stencil.euler_step(f.values, dt, out.values);
  return out;
}

void evolve_visit(const Stencil& stencil, const ScalarField& f0, const EvolutionParams& params,
                  const std::function<void(std::size_t, const ScalarField&)>& visit) {
  if (!(f0.lattice == stencil.lattice())) throw LatticeMismatch();
  const int d = stencil.lattice().dimension();
  if (params.dt > 1.0 / (2.0 * d) * (1.0 + 1e-12)) {
    throw StabilityError("time step violates dt <= 1/(2d)");
  }
  ScalarField cur = f0;
  std::vector<double> next;
  long done = 0;
  for (std::size_t k = 0; k < params.steps.size(); ++k) {
    for (; done < params.steps[k]; ++done) {
      stencil.euler_step(cur.values, params.dt, next);
      cur.values.swap(next);
    }
    visit(k, cur);
  }
}

std::vector<ScalarField> evolve(const Environment& env, const ScalarField& f0,
                                const EvolutionParams& params) {
  std::vector<ScalarField> out;
  out.reserve(params.steps.size());
  evolve_visit(Stencil(env), f0, params, [&](std::size_t, const ScalarField& f) { out.push_back(f); });
  return out;
}

std::vector<KernelColumn> heat_kernel_column(const Environment& env, Vertex y,
                                             const EvolutionParams& params) {
  const ScalarField delta = indicator(env.lattice(), y);
  std::vector<KernelColumn> out;
  out.reserve(params.steps.size());
  evolve_visit(Stencil(env), delta, params, [&](std::size_t k, const ScalarField& f) {
    out.push_back(KernelColumn{y, params.times[k], f});
  });
  return out;
}

std::vector<OnDiagonalPoint> on_diagonal_series(const Environment& env, const EvolutionParams& params) {
  // Evolve once over the union of n and its two halves for every output n.
  std::vector<long> needed;
  for (long n : params.steps) {
    needed.push_back(n);
    needed.push_back(n / 2);
    needed.push_back(n - n / 2);
  }
  std::sort(needed.begin(), needed.end());
  needed.erase(std::unique(needed.begin(), needed.end()), needed.end());
  EvolutionParams all;
  all.dt = params.dt;
  all.steps = needed;
  for (long n : needed) all.times.push_back(static_cast<double>(n) * params.dt);

  std::vector<std::vector<double>> snaps(needed.size());
  evolve_visit(Stencil(env), indicator(env.lattice(), 0), all,
               [&](std::size_t k, const ScalarField& f) { snaps[k] = f.values; });
  auto snap_at = [&](long n) -> const std::vector<double>& {
    const auto it = std::lower_bound(needed.begin(), needed.end(), n);
    return snaps[static_cast<std::size_t>(it - needed.begin())];
  };

  std::vector<OnDiagonalPoint> out;
  for (std::size_t k = 0; k < params.steps.size(); ++k) {
    const long n = params.steps[k];
    const auto& full = snap_at(n);
    const auto& lo = snap_at(n / 2);
    const auto& hi = snap_at(n - n / 2);
    std::vector<double> prod(lo.size());
    for (std::size_t i = 0; i < lo.size(); ++i) prod[i] = lo[i] * hi[i];
    OnDiagonalPoint pt;
    pt.t = params.times[k];
    pt.p00 = full[0];
    pt.mass = pairwise_sum(full);
    pt.half_identity_gap = std::abs(full[0] - pairwise_sum(prod));
    out.push_back(pt);
  }
  return out;
}

double check_semigroup(const Environment& env, double t, double s, double dt) {
  const TorusLattice& lat = env.lattice();
  const long nt = std::lround(t / dt);
  const long ns = std::lround(s / dt);
  auto on_grid = [dt](double x, long n) { return std::abs(x - static_cast<double>(n) * dt) <= 1e-9 * std::max(1.0, x); };
  if (t < 0.0 || s < 0.0 || !on_grid(t, nt) || !on_grid(s, ns)) {
    throw ValidationError("semigroup check times must lie on the dt grid");
  }
  const int d = lat.dimension();
  const Stencil stencil(env);
  auto column = [&](Vertex source, long steps) {
    std::vector<double> cur(lat.vertex_count(), 0.0), next;
    cur[source] = 1.0;
    for (long k = 0; k < steps; ++k) {
      stencil.euler_step(cur, dt, next);
      cur.swap(next);
    }
    return cur;
  };
  if (dt > 1.0 / (2.0 * d) * (1.0 + 1e-12)) throw StabilityError("time step violates dt <= 1/(2d)");

  const std::vector<double> p_sum = column(0, nt + ns);
  const std::vector<double> p_s = column(0, ns);
  // composed(x) = sum_z p_t(x, z) p_s(z, 0), with p_t(., z) the column from z.
  std::vector<double> composed(lat.vertex_count(), 0.0);
  for (Vertex z = 0; z < lat.vertex_count(); ++z) {
    if (p_s[z] == 0.0) continue;
    const std::vector<double> p_t = column(z, nt);
    for (Vertex x = 0; x < lat.vertex_count(); ++x) composed[x] += p_t[x] * p_s[z];
  }
  double worst = 0.0;
  for (Vertex x = 0; x < lat.vertex_count(); ++x) {
    worst = std::max(worst, std::abs(p_sum[x] - composed[x]));
  }
  return worst;
}

}  // namespace rcm
