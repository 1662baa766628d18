#include "rcm/resistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "rcm/error.hpp"
#include "rcm/parallel.hpp"
#include "rcm/stats.hpp"

namespace rcm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTolerance = 1e-12;

}  // namespace

const char* to_string(Provenance p) { return p == Provenance::kOptimal ? "optimal" : "detour"; }

double path_resistance(const Environment& env, const std::vector<EdgeId>& path) {
  double r = 0.0;
  for (EdgeId b : path) {
    if (env[b] <= 0.0) return kInf;
    r += 1.0 / env[b];
  }
  return r;
}

bool connects_endpoints(const TorusLattice& lat, EdgeId e, const std::vector<EdgeId>& path) {
  if (path.empty()) return false;
  Vertex at = lat.lower(e);
  for (EdgeId b : path) {
    if (b >= lat.edge_count()) return false;
    if (lat.lower(b) == at) {
      at = lat.upper(b);
    } else if (lat.upper(b) == at) {
      at = lat.lower(b);
    } else {
      return false;
    }
  }
  return at == lat.upper(e);
}

ResistanceSolver::ResistanceSolver(const Environment& env)
    : env_(env),
      forward_(env.lattice().vertex_count(), kInf),
      backward_(env.lattice().vertex_count(), kInf) {}

void ResistanceSolver::reset(std::vector<double>& dist, std::vector<Vertex>& touched) {
  for (Vertex v : touched) dist[v] = kInf;
  touched.clear();
}

// Dijkstra from source; stops once `target` is settled or every remaining
// label exceeds `bound`.
void ResistanceSolver::search(Vertex source, Vertex target, double bound, std::vector<double>& dist,
                              std::vector<Vertex>& touched) {
  const TorusLattice& lat = env_.lattice();
  const int d = lat.dimension();
  using Item = std::pair<double, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  touched.push_back(source);
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    const auto [du, u] = heap.top();
    heap.pop();
    if (du > dist[u]) continue;
    if (u == target || du > bound) break;
    for (int i = 0; i < d; ++i) {
      for (int sign : {+1, -1}) {
        const Vertex v = lat.neighbor(u, i, sign);
        const EdgeId b = sign > 0 ? lat.edge(u, i) : lat.edge(v, i);
        const double a = env_[b];
        if (a <= 0.0) continue;
        const double nd = du + 1.0 / a;
        if (nd < dist[v]) {
          if (dist[v] == kInf) touched.push_back(v);
          dist[v] = nd;
          heap.emplace(nd, v);
        }
      }
    }
  }
}

PathCertificate ResistanceSolver::certify(EdgeId e) {
  const TorusLattice& lat = env_.lattice();
  if (e >= lat.edge_count()) throw ValidationError("edge out of range");
  const Vertex s = lat.lower(e);
  const Vertex t = lat.upper(e);
  const int d = lat.dimension();

  reset(forward_, forward_touched_);
  reset(backward_, backward_touched_);
  search(s, t, kInf, forward_, forward_touched_);
  const double best = forward_[t];
  if (best == kInf) {
    throw DisconnectedError("edge " + std::to_string(e) +
                            ": endpoints not connected through positive conductances");
  }
  const double slack = best * kTieTolerance;
  search(t, lat.vertex_count(), best + slack, backward_, backward_touched_);

  // Greedy walk: the smallest edge index that still admits a shortest
  // completion gives the lexicographically smallest optimal sequence.
  PathCertificate cert;
  cert.edge = e;
  cert.provenance = Provenance::kOptimal;
  Vertex at = s;
  double walked = 0.0;
  while (at != t) {
    EdgeId chosen = lat.edge_count();
    Vertex chosen_next = 0;
    double chosen_cost = 0.0;
    for (int i = 0; i < d; ++i) {
      for (int sign : {+1, -1}) {
        const Vertex v = lat.neighbor(at, i, sign);
        const EdgeId b = sign > 0 ? lat.edge(at, i) : lat.edge(v, i);
        const double a = env_[b];
        if (a <= 0.0 || b >= chosen) continue;
        const double c = 1.0 / a;
        if (walked + c + backward_[v] <= best + slack) {
          chosen = b;
          chosen_next = v;
          chosen_cost = c;
        }
      }
    }
    if (chosen == lat.edge_count() || cert.path.size() > lat.vertex_count()) {
      throw Error("shortest-path reconstruction failed for edge " + std::to_string(e));
    }
    cert.path.push_back(chosen);
    walked += chosen_cost;
    at = chosen_next;
  }
  // 1 / (1 / a) need not round back to a
  cert.weight = cert.path.size() == 1 ? env_[cert.path[0]] : 1.0 / path_resistance(env_, cert.path);
  return cert;
}

PathCertificate minimal_resistance(const Environment& env, EdgeId e) {
  ResistanceSolver solver(env);
  return solver.certify(e);
}

std::vector<PathCertificate> certify_all(const Environment& env, int threads) {
  const std::size_t m = env.lattice().edge_count();
  constexpr std::size_t kBlock = 2048;
  const std::size_t blocks = (m + kBlock - 1) / kBlock;
  std::vector<PathCertificate> out(m);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    ResistanceSolver solver(env);
    const std::size_t end = std::min(m, (blk + 1) * kBlock);
    for (EdgeId e = blk * kBlock; e < end; ++e) out[e] = solver.certify(e);
  });
  return out;
}

double default_detour_threshold(const ConductanceLaw& law) {
  const double m = lower_median(law);
  return m > 0.0 ? 0.5 * m : 0.5 * essential_sup(law);
}

PathCertificate detour_path(const Environment& env, EdgeId e, const DetourParams& params) {
  const TorusLattice& lat = env.lattice();
  if (e >= lat.edge_count()) throw ValidationError("edge out of range");
  const int j = lat.direction(e);
  const int d = lat.dimension();
  const double eps = params.epsilon.value_or(default_detour_threshold(env.law()[j]));
  if (!(eps > 0.0)) throw ValidationError("detour threshold epsilon must be positive");

  PathCertificate cert;
  cert.edge = e;
  cert.provenance = Provenance::kDetour;
  if (env[e] > eps) {
    cert.path = {e};
    cert.weight = env[e];
    return cert;
  }

  std::vector<SignedDirection> order = params.order;
  if (order.empty()) {
    for (int sign : {+1, -1}) {
      for (int i = 0; i < d; ++i) {
        if (i != j) order.push_back({i, sign});
      }
    }
  }
  const long max_steps = lat.side() / 2;
  const Vertex z = lat.lower(e);
  for (const auto& [i, sign] : order) {
    if (i == j || i < 0 || i >= d) continue;
    // Edge from w to w + sign * e_i.
    auto leg = [&](Vertex w) { return sign > 0 ? lat.edge(w, i) : lat.edge(lat.neighbor(w, i, -1), i); };
    Vertex base = z;
    long K = -1;
    for (long k = 1; k <= max_steps; ++k) {
      base = lat.neighbor(base, i, sign);
      if (env[lat.edge(base, j)] > eps) {
        K = k;
        break;
      }
    }
    if (K < 0) continue;
    std::vector<EdgeId> path;
    Vertex w = z;
    for (long k = 0; k < K; ++k) {
      path.push_back(leg(w));
      w = lat.neighbor(w, i, sign);
    }
    path.push_back(lat.edge(w, j));
    std::vector<EdgeId> back;
    Vertex u = lat.neighbor(z, j, +1);
    for (long k = 0; k < K; ++k) {
      back.push_back(leg(u));
      u = lat.neighbor(u, i, sign);
    }
    path.insert(path.end(), back.rbegin(), back.rend());
    const double r = path_resistance(env, path);
    if (r == kInf) continue;
    cert.path = std::move(path);
    cert.weight = 1.0 / r;
    return cert;
  }
  throw ScanExhaustedError("edge " + std::to_string(e) +
                           ": no transverse scan found a parallel conductance above epsilon within L/2 steps");
}

bool InversePathIndex::contains(EdgeId b, EdgeId e) const {
  return std::binary_search(users[b].begin(), users[b].end(), e);
}

InversePathIndex build_inverse_index(const std::vector<PathCertificate>& certs, std::size_t edge_count) {
  InversePathIndex index;
  index.users.resize(edge_count);
  for (const auto& cert : certs) {
    for (EdgeId b : cert.path) {
      if (b >= edge_count) throw ValidationError("certificate path edge out of range");
      index.users[b].push_back(cert.edge);
    }
  }
  for (auto& u : index.users) {
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
  }
  return index;
}

EnergyCheck verify_energy_inequality(const Environment& env, const PathCertificate& cert,
                                     const ScalarField& f) {
  const TorusLattice& lat = env.lattice();
  if (!(f.lattice == lat)) throw LatticeMismatch();
  auto grad = [&](EdgeId b) { return f[lat.upper(b)] - f[lat.lower(b)]; };
  EnergyCheck out;
  const double g = grad(cert.edge);
  out.lhs = cert.weight * g * g;
  for (EdgeId b : cert.path) {
    const double gb = grad(b);
    out.rhs += env[b] * gb * gb;
  }
  out.holds = out.lhs <= out.rhs + 1e-12;
  return out;
}

ModerationStatistic compute_moderation(const TorusLattice& lat, const std::vector<PathCertificate>& certs,
                                       double q, double r_exponent) {
  if (!(q > 0.0)) throw ValidationError("moderation exponent q must be positive");
  if (!(r_exponent > 0.0)) throw ValidationError("moderation r_exponent must be positive");
  if (certs.size() != lat.edge_count()) throw ValidationError("need one certificate per edge");
  const long rmax = lat.side() / 2;
  // Bucket w^-q by squared distance of the upper endpoint.
  std::vector<std::vector<double>> by_d2(static_cast<std::size_t>(rmax * rmax + 1));
  for (const auto& cert : certs) {
    const long d2 = lat.distance2(lat.upper(cert.edge));
    if (d2 <= rmax * rmax) by_d2[static_cast<std::size_t>(d2)].push_back(std::pow(cert.weight, -q));
  }
  ModerationStatistic out;
  out.q = q;
  out.r_exponent = r_exponent;
  double best = -1.0;
  double running = 0.0;
  long next_d2 = 0;
  for (long r = 1; r <= rmax; ++r) {
    for (; next_d2 <= r * r; ++next_d2) running += pairwise_sum(by_d2[static_cast<std::size_t>(next_d2)]);
    const double avg = running / std::pow(static_cast<double>(r), lat.dimension());
    if (avg > best) {
      best = avg;
      out.maximizing_radius = r;
    }
  }
  out.value = std::pow(best, r_exponent);
  return out;
}

ModerationStatistic compute_moderation(const Environment& env, double q, double r_exponent, int threads) {
  return compute_moderation(env.lattice(), certify_all(env, threads), q, r_exponent);
}

EdgeId central_edge(const TorusLattice& lat) {
  Coords c{};
  for (int i = 0; i < lat.dimension(); ++i) c[static_cast<std::size_t>(i)] = lat.side() / 2;
  return lat.edge(lat.vertex(c), 0);
}

WeightMomentReport weight_moment_estimate(const EnvironmentLaw& law, long L, const std::vector<double>& q_list,
                                          std::size_t reps, std::uint64_t seed, int threads) {
  validate(law);
  const TorusLattice lat = build_torus(law.dimension(), L);
  const EdgeId e = central_edge(lat);
  struct Sample {
    bool ok = false;
    double weight = 0.0;
    double length = 0.0;
  };
  std::vector<Sample> samples(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const Environment env = sample_environment(law, lat, derive_seed(seed, r));
    try {
      const PathCertificate cert = minimal_resistance(env, e);
      samples[r] = Sample{true, cert.weight, static_cast<double>(cert.path.size())};
    } catch (const DisconnectedError&) {
      samples[r] = Sample{};
    }
  });

  WeightMomentReport report;
  std::vector<double> q_check;
  for (double q : q_list) q_check.push_back(std::max(q, 1.0));
  for (const auto& v : moment_condition_check(law, q_check)) report.flagged = report.flagged || !v.pass;
  for (const auto& s : samples) {
    if (s.ok) {
      ++report.reps_used;
    } else {
      ++report.fail_count;
    }
  }
  for (double q : q_list) {
    std::vector<double> w, len;
    for (const auto& s : samples) {
      if (!s.ok) continue;
      w.push_back(std::pow(s.weight, -q));
      len.push_back(std::pow(s.length, q));
    }
    const MeanStderr ws = mean_stderr(w);
    const MeanStderr ls = mean_stderr(len);
    report.rows.push_back(WeightMomentRow{q, ws.mean, ws.stderr_, ls.mean, ls.stderr_});
  }
  return report;
}

}  // namespace rcm
