#pragma once

// Forward-Euler evolution of d/dt u + div(a grad u) = 0 on the torus and the
// heat kernel built from it.
//
// With conductances in [0, 1] and dt <= 1/(2d) one step is
//   u'(x) = (1 - dt sum_y a(x,y)) u(x) + dt sum_y a(x,y) u(y),
// a convex combination with a symmetric, doubly stochastic matrix. Positivity,
// mass and the maximum principle therefore hold exactly, and composing steps
// reproduces the discrete semigroup identities up to rounding.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

// Neighbour table and conductances laid out per vertex for the update loop.
class Stencil {
 public:
  explicit Stencil(const Environment& env);
  explicit Stencil(const EdgeField& conductances);

  const TorusLattice& lattice() const { return lattice_; }
  int degree() const { return degree_; }

  // out = f - dt * div(a grad f). `out` must not alias `f`.
  void euler_step(const std::vector<double>& f, double dt, std::vector<double>& out) const;
  // out = mass * f + div(a grad f).
  void apply(const std::vector<double>& f, double mass, std::vector<double>& out) const;
  // sum_y a(x, y) for each x.
  const std::vector<double>& total_conductance() const { return diag_; }

 private:
  TorusLattice lattice_;
  int degree_ = 0;
  std::vector<std::size_t> neighbors_;
  std::vector<double> weights_;
  std::vector<double> diag_;
};

struct EvolutionParams {
  double dt = 0.0;
  // Output times snapped to the dt grid, strictly increasing.
  std::vector<double> times;
  std::vector<long> steps;

  double t_max() const { return times.empty() ? 0.0 : times.back(); }
};

inline double default_dt(int d) { return 1.0 / (4.0 * d); }

// Snaps each requested time to the nearest multiple of dt. Throws
// StabilityError when dt > 1/(2d) and ValidationError for negative,
// non-increasing or colliding times.
EvolutionParams make_evolution_params(int d, double dt, const std::vector<double>& times);

// `count` times geometrically spaced in [t_lo, t_hi], snapped to the dt grid;
// duplicates created by snapping are dropped. When include_zero, t = 0 is
// prepended.
std::vector<double> log_spaced_times(double t_lo, double t_hi, int count, bool include_zero);

// Message when t_max exceeds (L/4)^2 and wrap-around starts to matter.
std::optional<std::string> wraparound_warning(const EvolutionParams& params, const TorusLattice& lattice);

ScalarField euler_step(const Environment& env, const ScalarField& f, double dt);

// Calls visit(k, snapshot) for each output time k in order.
void evolve_visit(const Stencil& stencil, const ScalarField& f0, const EvolutionParams& params,
                  const std::function<void(std::size_t, const ScalarField&)>& visit);

std::vector<ScalarField> evolve(const Environment& env, const ScalarField& f0,
                                const EvolutionParams& params);

struct KernelColumn {
  Vertex source = 0;
  double t = 0.0;
  ScalarField values;
};

std::vector<KernelColumn> heat_kernel_column(const Environment& env, Vertex y,
                                             const EvolutionParams& params);

struct OnDiagonalPoint {
  double t = 0.0;
  double p00 = 0.0;
  double mass = 0.0;
  // |p_t(0,0) - sum_x p_{t/2}(x,0)^2|; for an odd step count n the two halves
  // are floor(n/2) and ceil(n/2) steps.
  double half_identity_gap = 0.0;
};

std::vector<OnDiagonalPoint> on_diagonal_series(const Environment& env, const EvolutionParams& params);

// max_x |p_{t+s}(x,0) - sum_z p_t(x,z) p_s(z,0)| with p_t(x, z) read from the
// column solved from each source z. Costs one column solve per vertex.
double check_semigroup(const Environment& env, double t, double s, double dt);

}  // namespace rcm
