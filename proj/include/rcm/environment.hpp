#pragma once

// Conductance laws, sampled environments and local observables.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "rcm/lattice.hpp"
#include "rcm/random.hpp"

namespace rcm {

struct ConstantLaw {
  double c = 1.0;
};

// Value hi with probability p, lo otherwise.
struct BernoulliLaw {
  double p = 0.5;
  double lo = 0.0;
  double hi = 1.0;
};

// a = 1 / (1 + E), E ~ Exp(rate).
struct InverseShiftedExponentialLaw {
  double rate = 1.0;
};

struct UniformLaw {
  double lo = 0.0;
  double hi = 1.0;
};

// a = U^(1/theta), so P(a <= s) = s^theta on [0, 1].
struct PowerLawNearZero {
  double theta = 1.0;
};

using ConductanceLaw =
    std::variant<ConstantLaw, BernoulliLaw, InverseShiftedExponentialLaw, UniformLaw, PowerLawNearZero>;

// Throws ValidationError for parameters outside the documented ranges,
// supports leaving [0, 1], or a Dirac mass at 0.
void validate(const ConductanceLaw& law);

// Inverse-CDF draw from u in [0, 1).
double draw(const ConductanceLaw& law, double u);
double mean(const ConductanceLaw& law);
double variance(const ConductanceLaw& law);
// P(a <= s).
double cdf(const ConductanceLaw& law, double s);
// inf{s : P(a <= s) >= 1/2}.
double lower_median(const ConductanceLaw& law);
double essential_sup(const ConductanceLaw& law);
// Points in (0, 1) where the CDF may jump or lose smoothness.
std::vector<double> cdf_breakpoints(const ConductanceLaw& law);

// Behaviour of the CDF at 0: P(a = 0) and the exponent k in P(a <= s) ~ s^k
// (infinite when the CDF vanishes near 0 or decays faster than any power).
struct ZeroTail {
  double atom = 0.0;
  double exponent = 0.0;
};
ZeroTail zero_tail(const ConductanceLaw& law);

std::string describe(const ConductanceLaw& law);
nlohmann::json to_json(const ConductanceLaw& law);
ConductanceLaw law_from_json(const nlohmann::json& j);

// One law per lattice direction.
struct EnvironmentLaw {
  std::vector<ConductanceLaw> directions;

  static EnvironmentLaw isotropic(const ConductanceLaw& law, int d) {
    return EnvironmentLaw{std::vector<ConductanceLaw>(static_cast<std::size_t>(d), law)};
  }
  int dimension() const { return static_cast<int>(directions.size()); }
  const ConductanceLaw& operator[](int i) const { return directions[static_cast<std::size_t>(i)]; }
};

void validate(const EnvironmentLaw& law);
nlohmann::json to_json(const EnvironmentLaw& law);

class Environment {
 public:
  Environment(EdgeField conductances, EnvironmentLaw law, std::uint64_t seed);

  const TorusLattice& lattice() const { return conductances_.lattice; }
  const EdgeField& conductances() const { return conductances_; }
  double operator[](EdgeId e) const { return conductances_[e]; }
  const EnvironmentLaw& law() const { return law_; }
  std::uint64_t seed() const { return seed_; }

 private:
  EdgeField conductances_;
  EnvironmentLaw law_;
  std::uint64_t seed_;
};

// Independent draws in edge-index order from one mt19937_64 stream.
Environment sample_environment(const EnvironmentLaw& law, const TorusLattice& lattice,
                               std::uint64_t seed);

// tau_x: conductance of edge e in the result is that of x + e in env.
Environment shift(const Environment& env, Vertex x);

// Fresh draw at e from its direction's law; every other edge is untouched.
Environment resample_edge(const Environment& env, EdgeId e, std::uint64_t seed);

ScalarField apply_generator(const Environment& env, const ScalarField& f);

// ---------------------------------------------------------------------------
// Moment condition <(sup_i a(e_i))^(-q)> < infinity.

enum class MomentMethod { kQuadrature, kMonteCarlo };

struct MomentVerdict {
  double q = 1.0;
  bool pass = false;
  // Finite value of the moment when known (quadrature or Monte Carlo).
  std::optional<double> value;
  MomentMethod method = MomentMethod::kQuadrature;
  // Monte Carlo only: running estimate failed to stabilize.
  bool diverging = false;
  std::string reason;
};

// Closed-form CDFs of each direction's law are combined into the law of the
// supremum and integrated by tanh-sinh quadrature between breakpoints. The
// Monte-Carlo path (`draws` samples) is used when requested or when quadrature
// fails.
std::vector<MomentVerdict> moment_condition_check(const EnvironmentLaw& law,
                                                  const std::vector<double>& q_list,
                                                  MomentMethod method = MomentMethod::kQuadrature,
                                                  std::uint64_t seed = 1,
                                                  std::size_t draws = 1'000'000);

// ---------------------------------------------------------------------------
// Local observables g : Omega -> R, realized through their stationary
// extension x -> g(tau_x a).

struct CenteredConductance {
  // Lower endpoint of the edge relative to the origin, and its direction.
  Coords offset{};
  int direction = 0;
};

struct LocalObservable;

// g = D_i^* f, realized on the torus as div of the flux f(tau_x a) e_i.
struct DivergenceForm {
  int direction = 0;
  std::shared_ptr<const LocalObservable> inner;
};

struct LocalObservable {
  std::variant<CenteredConductance, DivergenceForm> kind;

  // Number of conductances the observable (or its inner f) depends on.
  int support_size() const;
  std::string describe() const;
};

// Default edge (e_1, 2 e_1), which avoids the origin.
LocalObservable centered_conductance(int d);
LocalObservable centered_conductance(const Coords& offset, int direction);
LocalObservable divergence_form(int direction, LocalObservable inner);

LocalObservable observable_from_json(const nlohmann::json& j, int d);
nlohmann::json to_json(const LocalObservable& obs, int d);

ScalarField evaluate_observable(const LocalObservable& obs, const Environment& env);

// ---------------------------------------------------------------------------
// Serialization: header line `# rcm-environment <json>` then `edge,conductance`
// rows with 17 significant digits.

inline constexpr int kEnvironmentFormatVersion = 1;

void write_environment(std::ostream& os, const Environment& env);
Environment read_environment(std::istream& is);

}  // namespace rcm
