#pragma once

// Minimal-resistance weights w(e), certified paths pi(e) and the statistics
// built on them.
//
//   w(e)^-1 = min over nearest-neighbour paths P joining the endpoints of e
//             of sum_{b in P} a(b)^-1.
//
// By Cauchy-Schwarz along the certified path,
//   w(e) |grad f(e)|^2 <= sum_{b in pi(e)} a(b) |grad f(b)|^2
// for every field f. Zero conductances are treated as deleted edges.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rcm/environment.hpp"
#include "rcm/lattice.hpp"

namespace rcm {

enum class Provenance { kOptimal, kDetour };

const char* to_string(Provenance p);

struct PathCertificate {
  EdgeId edge = 0;
  double weight = 0.0;
  // Edges in traversal order from the lower to the upper endpoint of `edge`.
  std::vector<EdgeId> path;
  Provenance provenance = Provenance::kOptimal;

  double resistance() const { return 1.0 / weight; }
};

// Sum of a(b)^-1 along a path; +inf when it crosses a zero conductance.
double path_resistance(const Environment& env, const std::vector<EdgeId>& path);

// True when `path` is a nearest-neighbour walk from lower(e) to upper(e).
bool connects_endpoints(const TorusLattice& lattice, EdgeId e, const std::vector<EdgeId>& path);

// Reusable Dijkstra workspace for one environment. Not thread-safe; use one
// per worker.
class ResistanceSolver {
 public:
  explicit ResistanceSolver(const Environment& env);

  // Shortest path under costs a(b)^-1. Among equal-cost paths (relative
  // tolerance 1e-12) the lexicographically smallest edge-index sequence wins.
  // Throws DisconnectedError when the endpoints are not joined by positive
  // conductances.
  PathCertificate certify(EdgeId e);

 private:
  void search(Vertex source, Vertex target, double bound, std::vector<double>& dist,
              std::vector<Vertex>& touched);
  void reset(std::vector<double>& dist, std::vector<Vertex>& touched);

  const Environment& env_;
  std::vector<double> forward_;
  std::vector<double> backward_;
  std::vector<Vertex> forward_touched_;
  std::vector<Vertex> backward_touched_;
};

PathCertificate minimal_resistance(const Environment& env, EdgeId e);

// One certificate per edge, indexed by edge id. Throws DisconnectedError when
// any edge cannot be certified.
std::vector<PathCertificate> certify_all(const Environment& env, int threads = 1);

struct SignedDirection {
  int dir = 0;
  int sign = +1;
};

struct DetourParams {
  // Threshold a > epsilon for the parallel copy of e; defaults to
  // default_detour_threshold of e's direction law.
  std::optional<double> epsilon;
  // Directions tried in order; empty means +e_i for i != dir(e) ascending,
  // then -e_i in the same order.
  std::vector<SignedDirection> order;
};

// Half the lower median of the law, or half its essential supremum when the
// median is 0. Always strictly positive and below the essential supremum.
double default_detour_threshold(const ConductanceLaw& law);

// Walk K steps from lower(e) along a transverse direction to the first
// parallel copy of e with conductance above epsilon, cross it, and walk back:
// a path of 2K + 1 edges. K = 0 returns {e}. Directions whose legs cross a
// zero conductance are skipped. Throws ScanExhaustedError when no direction
// finds such a copy within L/2 steps.
PathCertificate detour_path(const Environment& env, EdgeId e, const DetourParams& params = {});

struct InversePathIndex {
  // users[b] = sorted edges e with b in pi(e).
  std::vector<std::vector<EdgeId>> users;

  std::size_t size(EdgeId b) const { return users[b].size(); }
  bool contains(EdgeId b, EdgeId e) const;
};

InversePathIndex build_inverse_index(const std::vector<PathCertificate>& certs, std::size_t edge_count);

struct EnergyCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

// w(e) |grad f(e)|^2 <= sum_{b in path} a(b) |grad f(b)|^2 + 1e-12.
EnergyCheck verify_energy_inequality(const Environment& env, const PathCertificate& cert,
                                     const ScalarField& f);

struct ModerationStatistic {
  double q = 0.0;
  double r_exponent = 0.0;
  double value = 0.0;
  long maximizing_radius = 0;
};

// (max_{1 <= r <= L/2} r^-d sum_{|upper(e)| <= r} w(e)^-q)^r_exponent with
// torus distances from the origin.
ModerationStatistic compute_moderation(const TorusLattice& lattice,
                                       const std::vector<PathCertificate>& certs, double q,
                                       double r_exponent);
ModerationStatistic compute_moderation(const Environment& env, double q, double r_exponent,
                                       int threads = 1);

struct WeightMomentRow {
  double q = 0.0;
  double weight_mean = 0.0;    // <w^-q>
  double weight_stderr = 0.0;
  double length_mean = 0.0;    // <|pi|^q>
  double length_stderr = 0.0;
};

struct WeightMomentReport {
  std::vector<WeightMomentRow> rows;
  std::size_t reps_used = 0;
  std::size_t fail_count = 0;
  // Set when the law fails the moment condition for some requested q.
  bool flagged = false;
};

// Certificate of the edge (c, c + e_1) at the centre c of the torus, once per
// replicate environment seeded by derive_seed(seed, r).
WeightMomentReport weight_moment_estimate(const EnvironmentLaw& law, long L,
                                          const std::vector<double>& q_list, std::size_t reps,
                                          std::uint64_t seed, int threads = 1);

EdgeId central_edge(const TorusLattice& lattice);

}  // namespace rcm
