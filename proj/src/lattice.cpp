#include "rcm/lattice.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "rcm/error.hpp"

namespace rcm {

TorusLattice::TorusLattice(int d, long L) : d_(d), L_(L) {
  std::size_t stride = 1;
  for (int i = d - 1; i >= 0; --i) {
    strides_[static_cast<std::size_t>(i)] = stride;
    stride *= static_cast<std::size_t>(L);
  }
  vertex_count_ = stride;
}

TorusLattice build_torus(int d, long L) {
  if (d < 1 || d > kMaxDimension) {
    throw ValidationError("lattice dimension d must lie in [1, " +
                          std::to_string(kMaxDimension) + "], got " + std::to_string(d));
  }
  if (L < 3) {
    throw ValidationError("lattice side L must satisfy L >= 3 (no duplicate edges "
                          "under periodic wrap), got " + std::to_string(L));
  }
  double count = std::pow(static_cast<double>(L), d) * d;
  if (count > static_cast<double>(std::numeric_limits<std::size_t>::max() / 4)) {
    throw ValidationError("lattice too large to index");
  }
  return TorusLattice(d, L);
}

Coords TorusLattice::coords(Vertex v) const {
  Coords c{};
  for (int i = 0; i < d_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    c[k] = static_cast<long>((v / strides_[k]) % static_cast<std::size_t>(L_));
  }
  return c;
}

Vertex TorusLattice::vertex(const Coords& c) const {
  Vertex v = 0;
  for (int i = 0; i < d_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    long ci = c[k] % L_;
    if (ci < 0) ci += L_;
    v += static_cast<std::size_t>(ci) * strides_[k];
  }
  return v;
}

Vertex TorusLattice::translate(Vertex v, Vertex by) const {
  Coords a = coords(v);
  const Coords b = coords(by);
  for (int i = 0; i < d_; ++i) a[static_cast<std::size_t>(i)] += b[static_cast<std::size_t>(i)];
  return vertex(a);
}

Vertex TorusLattice::negate(Vertex v) const {
  Coords a = coords(v);
  for (int i = 0; i < d_; ++i) a[static_cast<std::size_t>(i)] = -a[static_cast<std::size_t>(i)];
  return vertex(a);
}

long TorusLattice::distance2(Vertex v) const {
  const Coords c = coords(v);
  long r2 = 0;
  for (int i = 0; i < d_; ++i) {
    long ci = c[static_cast<std::size_t>(i)];
    if (ci > L_ / 2) ci -= L_;
    r2 += ci * ci;
  }
  return r2;
}

namespace {

void require_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ValidationError(std::string(what) + " contains non-finite values");
  }
}

}  // namespace

ScalarField::ScalarField(const TorusLattice& lat, std::vector<double> v)
    : lattice(lat), values(std::move(v)) {
  if (values.size() != lattice.vertex_count()) {
    throw ValidationError("scalar field length " + std::to_string(values.size()) +
                          " does not match vertex count " + std::to_string(lattice.vertex_count()));
  }
  require_finite(values, "scalar field");
}

EdgeField::EdgeField(const TorusLattice& lat, std::vector<double> v)
    : lattice(lat), values(std::move(v)) {
  if (values.size() != lattice.edge_count()) {
    throw ValidationError("edge field length " + std::to_string(values.size()) +
                          " does not match edge count " + std::to_string(lattice.edge_count()));
  }
  require_finite(values, "edge field");
}

ScalarField indicator(const TorusLattice& lattice, Vertex y) {
  if (y >= lattice.vertex_count()) throw ValidationError("vertex out of range");
  ScalarField f(lattice);
  f[y] = 1.0;
  return f;
}

EdgeField gradient(const ScalarField& f) {
  const TorusLattice& lat = f.lattice;
  EdgeField out(lat);
  const int d = lat.dimension();
  for (Vertex v = 0; v < lat.vertex_count(); ++v) {
    for (int i = 0; i < d; ++i) {
      out[lat.edge(v, i)] = f[lat.neighbor(v, i, +1)] - f[v];
    }
  }
  return out;
}

ScalarField divergence(const EdgeField& h) {
  const TorusLattice& lat = h.lattice;
  ScalarField out(lat);
  const int d = lat.dimension();
  for (Vertex v = 0; v < lat.vertex_count(); ++v) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      acc += h[lat.edge(lat.neighbor(v, i, -1), i)] - h[lat.edge(v, i)];
    }
    out[v] = acc;
  }
  return out;
}

ScalarField apply_generator(const EdgeField& conductances, const ScalarField& f) {
  if (!(conductances.lattice == f.lattice)) throw LatticeMismatch();
  const TorusLattice& lat = f.lattice;
  ScalarField out(lat);
  const int d = lat.dimension();
  for (Vertex v = 0; v < lat.vertex_count(); ++v) {
    double acc = 0.0;
    for (int i = 0; i < d; ++i) {
      const Vertex up = lat.neighbor(v, i, +1);
      const Vertex down = lat.neighbor(v, i, -1);
      acc += conductances[lat.edge(v, i)] * (f[v] - f[up]);
      acc += conductances[lat.edge(down, i)] * (f[v] - f[down]);
    }
    out[v] = acc;
  }
  return out;
}

double space_time_weight(const WeightSpec& w, double distance2) {
  return std::pow(distance2 / (w.t + 1.0) + 1.0, 0.5 * w.alpha);
}

double weighted_sum(const ScalarField& f, const WeightSpec& w, int power) {
  if (power < 1) throw ValidationError("weighted_sum power must be >= 1");
  if (!std::isfinite(w.alpha)) throw ValidationError("weight exponent alpha must be finite");
  if (!(w.t >= 0.0)) throw ValidationError("weight time t must be >= 0");
  std::vector<double> terms(f.size());
  for (Vertex v = 0; v < f.size(); ++v) {
    const double omega = space_time_weight(w, static_cast<double>(f.lattice.distance2(v)));
    terms[v] = omega * omega * std::pow(std::abs(f[v]), power);
  }
  return pairwise_sum(terms);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double pairwise_sum(std::span<const double> values) {
  constexpr std::size_t kBlock = 64;
  if (values.size() <= kBlock) {
    double acc = 0.0;
    for (double x : values) acc += x;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace rcm
