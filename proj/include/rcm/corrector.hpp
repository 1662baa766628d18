#pragma once

// Massive corrector: (mu + div(a grad)) phi = -div(a e_i) on the torus.

#include <cstdint>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/heat.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

struct CorrectorSolution {
  int direction = 0;
  double mu = 0.0;
  ScalarField phi;
  // ||(mu + div a grad) phi - rhs||_inf / ||rhs||_inf (0 for a zero rhs).
  double residual = 0.0;
  long iterations = 0;
};

struct CorrectorOptions {
  double tol = 1e-10;
  // Jacobi preconditioning; worthwhile for mu <= 1e-4.
  bool precondition = false;
  // 0 means 10 * vertex_count.
  long max_iterations = 0;
};

// -div(a e_i): vertex x gets a(x, x + e_i) - a(x - e_i, x). Sums to zero.
ScalarField assemble_rhs(const Environment& env, int direction);

// Conjugate gradient on the symmetric positive definite operator
// mu + div(a grad), started from zero and stopped on the relative sup-norm
// residual. Throws NonConvergedError past the iteration cap.
CorrectorSolution solve_massive_corrector(const Environment& env, int direction, double mu,
                                          const CorrectorOptions& options = {});

// Shared with callers that already hold a stencil.
CorrectorSolution solve_massive_corrector(const Stencil& stencil, const ScalarField& rhs, int direction,
                                          double mu, const CorrectorOptions& options);

// mu ||phi||^2 + <grad phi, a grad phi> and <phi, rhs>; equal for an exact solve.
struct EnergyBalance {
  double energy = 0.0;
  double work = 0.0;
  double relative_gap() const;
};
EnergyBalance corrector_energy(const Environment& env, const CorrectorSolution& sol);

struct CorrectorMomentRow {
  double mu = 0.0;
  double p = 0.0;
  // <|phi|^p>^(1/p) from spatial and ensemble averaging.
  double moment = 0.0;
  double stderr_ = 0.0;
  // <|phi|^p> before the root.
  double raw = 0.0;
  std::size_t reps_used = 0;
  std::size_t nonconverged = 0;
  // Largest relative energy-identity gap over the converged solves.
  double max_energy_gap = 0.0;
};

struct CorrectorSweepSpec {
  EnvironmentLaw law;
  long L = 16;
  int direction = 0;
  std::vector<double> mu_list;
  std::vector<double> p_list{2.0};
  std::size_t reps = 10;
  std::uint64_t seed = 1;
  CorrectorOptions options;
  int threads = 1;
};

// Rows ordered by mu (as given) then p.
std::vector<CorrectorMomentRow> corrector_moment_sweep(const CorrectorSweepSpec& spec);

}  // namespace rcm
