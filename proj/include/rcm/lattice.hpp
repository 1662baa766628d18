#pragma once

// Periodic torus (Z/LZ)^d and the discrete calculus on it.
//
// Vertices are indexed row-major over coordinates with the first coordinate
// varying slowest. The edge joining v and v + e_i carries index v * d + i, so
// v is its lower endpoint and v + e_i (with wrap) its upper endpoint.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace rcm {

using Vertex = std::size_t;
using EdgeId = std::size_t;

inline constexpr int kMaxDimension = 8;

using Coords = std::array<long, kMaxDimension>;

class TorusLattice {
 public:
  TorusLattice() = default;
  TorusLattice(int d, long L);

  int dimension() const { return d_; }
  long side() const { return L_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return vertex_count_ * static_cast<std::size_t>(d_); }

  Coords coords(Vertex v) const;
  // Coordinates are reduced modulo L, so negative entries are fine.
  Vertex vertex(const Coords& c) const;

  // v + sign * e_dir with periodic wrap; sign is +1 or -1.
  Vertex neighbor(Vertex v, int dir, int sign = +1) const {
    const std::size_t stride = strides_[static_cast<std::size_t>(dir)];
    const long c = static_cast<long>((v / stride) % static_cast<std::size_t>(L_));
    if (sign > 0) {
      return c == L_ - 1 ? v - static_cast<std::size_t>(L_ - 1) * stride : v + stride;
    }
    return c == 0 ? v + static_cast<std::size_t>(L_ - 1) * stride : v - stride;
  }

  // Torus addition of vertices viewed as group elements.
  Vertex translate(Vertex v, Vertex by) const;
  Vertex negate(Vertex v) const;

  EdgeId edge(Vertex lower, int dir) const {
    return lower * static_cast<std::size_t>(d_) + static_cast<std::size_t>(dir);
  }
  Vertex lower(EdgeId e) const { return e / static_cast<std::size_t>(d_); }
  int direction(EdgeId e) const { return static_cast<int>(e % static_cast<std::size_t>(d_)); }
  Vertex upper(EdgeId e) const { return neighbor(lower(e), direction(e), +1); }
  EdgeId translate_edge(EdgeId e, Vertex by) const {
    return edge(translate(lower(e), by), direction(e));
  }

  // Squared Euclidean distance from the origin under the minimal-image
  // convention per coordinate.
  long distance2(Vertex v) const;

  bool operator==(const TorusLattice& other) const {
    return d_ == other.d_ && L_ == other.L_;
  }

 private:
  int d_ = 0;
  long L_ = 0;
  std::size_t vertex_count_ = 0;
  std::array<std::size_t, kMaxDimension> strides_{};
};

// Rejects d < 1, d > kMaxDimension, L < 3 and lattices too large to index.
TorusLattice build_torus(int d, long L);

struct ScalarField {
  TorusLattice lattice;
  std::vector<double> values;

  ScalarField() = default;
  explicit ScalarField(const TorusLattice& lat, double fill = 0.0)
      : lattice(lat), values(lat.vertex_count(), fill) {}
  ScalarField(const TorusLattice& lat, std::vector<double> v);

  double& operator[](Vertex v) { return values[v]; }
  double operator[](Vertex v) const { return values[v]; }
  std::size_t size() const { return values.size(); }
};

struct EdgeField {
  TorusLattice lattice;
  std::vector<double> values;

  EdgeField() = default;
  explicit EdgeField(const TorusLattice& lat, double fill = 0.0)
      : lattice(lat), values(lat.edge_count(), fill) {}
  EdgeField(const TorusLattice& lat, std::vector<double> v);

  double& operator[](EdgeId e) { return values[e]; }
  double operator[](EdgeId e) const { return values[e]; }
  std::size_t size() const { return values.size(); }
};

ScalarField indicator(const TorusLattice& lattice, Vertex y);

// (grad f)(b) = f(upper b) - f(lower b).
EdgeField gradient(const ScalarField& f);

// l2 adjoint of gradient: (div h)(x) = sum_i h(x - e_i, i) - h(x, i).
ScalarField divergence(const EdgeField& h);

// div(a * grad f), i.e. -sum_{y~x} a(x,y) (f(y) - f(x)). Positive semidefinite.
ScalarField apply_generator(const EdgeField& conductances, const ScalarField& f);

struct WeightSpec {
  double alpha = 0.0;
  double t = 0.0;
};

// omega_alpha(t, x) = (|x|^2 / (t + 1) + 1)^(alpha / 2), |x| the torus distance
// from the origin.
double space_time_weight(const WeightSpec& w, double distance2);

// sum_x omega_alpha(t, x)^2 |f(x)|^power.
double weighted_sum(const ScalarField& f, const WeightSpec& w, int power);

double dot(std::span<const double> a, std::span<const double> b);

// Pairwise (cascade) summation; result is independent of thread count since
// callers reduce in a fixed order.
double pairwise_sum(std::span<const double> values);

}  // namespace rcm
