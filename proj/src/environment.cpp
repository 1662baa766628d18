#include "rcm/environment.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "rcm/error.hpp"

namespace rcm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

// lambda e^lambda E_1(lambda) = <1 / (1 + E)>.
double inverse_shifted_exponential_mean(double rate) {
  if (rate > 500.0) {
    // Asymptotic series avoids overflow of e^rate.
    const double r = 1.0 / rate;
    return 1.0 - r + 2.0 * r * r - 6.0 * r * r * r + 24.0 * r * r * r * r;
  }
  return rate * std::exp(rate) * boost::math::expint(1, rate);
}

}  // namespace

void validate(const ConductanceLaw& law) {
  std::visit(
      overloaded{
          [](const ConstantLaw& l) {
            if (!(l.c > 0.0 && l.c <= 1.0))
              throw ValidationError("Constant law requires c in (0, 1]");
          },
          [](const BernoulliLaw& l) {
            if (!in_unit(l.p)) throw ValidationError("Bernoulli law requires p in [0, 1]");
            if (!(l.lo >= 0.0 && l.lo < l.hi && l.hi <= 1.0))
              throw ValidationError("Bernoulli law requires 0 <= lo < hi <= 1");
            if (l.p == 0.0 && l.lo == 0.0)
              throw ValidationError("Bernoulli law with p = 0 and lo = 0 is a Dirac mass at 0");
          },
          [](const InverseShiftedExponentialLaw& l) {
            if (!(l.rate > 0.0 && std::isfinite(l.rate)))
              throw ValidationError("InverseShiftedExponential law requires rate > 0");
          },
          [](const UniformLaw& l) {
            if (!(l.lo >= 0.0 && l.lo < l.hi && l.hi <= 1.0))
              throw ValidationError("Uniform law requires 0 <= lo < hi <= 1");
          },
          [](const PowerLawNearZero& l) {
            if (!(l.theta > 0.0 && std::isfinite(l.theta)))
              throw ValidationError("PowerLawNearZero law requires theta > 0");
          },
      },
      law);
}

double draw(const ConductanceLaw& law, double u) {
  return std::visit(
      overloaded{
          [](const ConstantLaw& l) { return l.c; },
          [u](const BernoulliLaw& l) { return u < l.p ? l.hi : l.lo; },
          [u](const InverseShiftedExponentialLaw& l) {
            const double e = -std::log1p(-u) / l.rate;
            return 1.0 / (1.0 + e);
          },
          [u](const UniformLaw& l) { return l.lo + (l.hi - l.lo) * u; },
          [u](const PowerLawNearZero& l) { return std::pow(1.0 - u, 1.0 / l.theta); },
      },
      law);
}

double mean(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw& l) { return l.c; },
          [](const BernoulliLaw& l) { return l.p * l.hi + (1.0 - l.p) * l.lo; },
          [](const InverseShiftedExponentialLaw& l) {
            return inverse_shifted_exponential_mean(l.rate);
          },
          [](const UniformLaw& l) { return 0.5 * (l.lo + l.hi); },
          [](const PowerLawNearZero& l) { return l.theta / (l.theta + 1.0); },
      },
      law);
}

double variance(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw&) { return 0.0; },
          [](const BernoulliLaw& l) { return l.p * (1.0 - l.p) * (l.hi - l.lo) * (l.hi - l.lo); },
          [](const InverseShiftedExponentialLaw& l) {
            const double m = inverse_shifted_exponential_mean(l.rate);
            // <a^2> = rate (1 - <a>), by parts.
            return l.rate * (1.0 - m) - m * m;
          },
          [](const UniformLaw& l) { return (l.hi - l.lo) * (l.hi - l.lo) / 12.0; },
          [](const PowerLawNearZero& l) {
            const double m = l.theta / (l.theta + 1.0);
            return l.theta / (l.theta + 2.0) - m * m;
          },
      },
      law);
}

double cdf(const ConductanceLaw& law, double s) {
  if (s < 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return std::visit(
      overloaded{
          [s](const ConstantLaw& l) { return s >= l.c ? 1.0 : 0.0; },
          [s](const BernoulliLaw& l) {
            if (s < l.lo) return 0.0;
            return s < l.hi ? 1.0 - l.p : 1.0;
          },
          [s](const InverseShiftedExponentialLaw& l) {
            if (s <= 0.0) return 0.0;
            return std::exp(-l.rate * (1.0 / s - 1.0));
          },
          [s](const UniformLaw& l) { return std::clamp((s - l.lo) / (l.hi - l.lo), 0.0, 1.0); },
          [s](const PowerLawNearZero& l) { return std::pow(s, l.theta); },
      },
      law);
}

double lower_median(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw& l) { return l.c; },
          [](const BernoulliLaw& l) { return 1.0 - l.p >= 0.5 ? l.lo : l.hi; },
          [](const InverseShiftedExponentialLaw& l) {
            return 1.0 / (1.0 + std::numbers::ln2 / l.rate);
          },
          [](const UniformLaw& l) { return 0.5 * (l.lo + l.hi); },
          [](const PowerLawNearZero& l) { return std::pow(0.5, 1.0 / l.theta); },
      },
      law);
}

double essential_sup(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw& l) { return l.c; },
          [](const BernoulliLaw& l) { return l.p > 0.0 ? l.hi : l.lo; },
          [](const InverseShiftedExponentialLaw&) { return 1.0; },
          [](const UniformLaw& l) { return l.hi; },
          [](const PowerLawNearZero&) { return 1.0; },
      },
      law);
}

std::vector<double> cdf_breakpoints(const ConductanceLaw& law) {
  std::vector<double> pts = std::visit(
      overloaded{
          [](const ConstantLaw& l) { return std::vector<double>{l.c}; },
          [](const BernoulliLaw& l) { return std::vector<double>{l.lo, l.hi}; },
          [](const InverseShiftedExponentialLaw&) { return std::vector<double>{}; },
          [](const UniformLaw& l) { return std::vector<double>{l.lo, l.hi}; },
          [](const PowerLawNearZero&) { return std::vector<double>{}; },
      },
      law);
  std::erase_if(pts, [](double x) { return !(x > 0.0 && x < 1.0); });
  return pts;
}

ZeroTail zero_tail(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw&) { return ZeroTail{0.0, kInf}; },
          [](const BernoulliLaw& l) {
            if (l.lo > 0.0 || l.p == 1.0) return ZeroTail{0.0, kInf};
            return ZeroTail{1.0 - l.p, 0.0};
          },
          [](const InverseShiftedExponentialLaw&) { return ZeroTail{0.0, kInf}; },
          [](const UniformLaw& l) { return l.lo > 0.0 ? ZeroTail{0.0, kInf} : ZeroTail{0.0, 1.0}; },
          [](const PowerLawNearZero& l) { return ZeroTail{0.0, l.theta}; },
      },
      law);
}

std::string describe(const ConductanceLaw& law) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const ConstantLaw& l) { os << "Constant(" << l.c << ")"; },
                 [&](const BernoulliLaw& l) {
                   os << "Bernoulli(" << l.p << ", " << l.lo << ", " << l.hi << ")";
                 },
                 [&](const InverseShiftedExponentialLaw& l) {
                   os << "InverseShiftedExponential(" << l.rate << ")";
                 },
                 [&](const UniformLaw& l) { os << "Uniform(" << l.lo << ", " << l.hi << ")"; },
                 [&](const PowerLawNearZero& l) { os << "PowerLawNearZero(" << l.theta << ")"; },
             },
             law);
  return os.str();
}

nlohmann::json to_json(const ConductanceLaw& law) {
  return std::visit(
      overloaded{
          [](const ConstantLaw& l) { return nlohmann::json{{"type", "constant"}, {"c", l.c}}; },
          [](const BernoulliLaw& l) {
            return nlohmann::json{{"type", "bernoulli"}, {"p", l.p}, {"lo", l.lo}, {"hi", l.hi}};
          },
          [](const InverseShiftedExponentialLaw& l) {
            return nlohmann::json{{"type", "inverse_shifted_exponential"}, {"rate", l.rate}};
          },
          [](const UniformLaw& l) {
            return nlohmann::json{{"type", "uniform"}, {"lo", l.lo}, {"hi", l.hi}};
          },
          [](const PowerLawNearZero& l) {
            return nlohmann::json{{"type", "power_law_near_zero"}, {"theta", l.theta}};
          },
      },
      law);
}

namespace {

double number_field(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ValidationError(std::string("law field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

}  // namespace

ConductanceLaw law_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ValidationError("law must be an object with a string 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  ConductanceLaw law;
  if (type == "constant") {
    reject_unknown(j, {"type", "c"}, "constant law");
    law = ConstantLaw{number_field(j, "c", 1.0)};
  } else if (type == "bernoulli") {
    reject_unknown(j, {"type", "p", "lo", "hi"}, "bernoulli law");
    law = BernoulliLaw{number_field(j, "p", 0.5), number_field(j, "lo", 0.0), number_field(j, "hi", 1.0)};
  } else if (type == "inverse_shifted_exponential") {
    reject_unknown(j, {"type", "rate"}, "inverse_shifted_exponential law");
    law = InverseShiftedExponentialLaw{number_field(j, "rate", 1.0)};
  } else if (type == "uniform") {
    reject_unknown(j, {"type", "lo", "hi"}, "uniform law");
    law = UniformLaw{number_field(j, "lo", 0.0), number_field(j, "hi", 1.0)};
  } else if (type == "power_law_near_zero") {
    reject_unknown(j, {"type", "theta"}, "power_law_near_zero law");
    law = PowerLawNearZero{number_field(j, "theta", 1.0)};
  } else {
    throw ValidationError("unknown law type '" + type + "'");
  }
  validate(law);
  return law;
}

void validate(const EnvironmentLaw& law) {
  if (law.directions.empty()) throw ValidationError("environment law has no directions");
  for (const auto& l : law.directions) validate(l);
}

nlohmann::json to_json(const EnvironmentLaw& law) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& l : law.directions) arr.push_back(to_json(l));
  return arr;
}

// ---------------------------------------------------------------------------

Environment::Environment(EdgeField conductances, EnvironmentLaw law, std::uint64_t seed)
    : conductances_(std::move(conductances)), law_(std::move(law)), seed_(seed) {
  if (law_.dimension() != conductances_.lattice.dimension()) {
    throw ValidationError("law has " + std::to_string(law_.dimension()) +
                          " directions but the lattice has dimension " +
                          std::to_string(conductances_.lattice.dimension()));
  }
  for (double a : conductances_.values) {
    if (!(a >= 0.0 && a <= 1.0)) throw ValidationError("conductances must lie in [0, 1]");
  }
}

Environment sample_environment(const EnvironmentLaw& law, const TorusLattice& lattice,
                               std::uint64_t seed) {
  validate(law);
  if (law.dimension() != lattice.dimension()) {
    throw ValidationError("law dimension does not match lattice dimension");
  }
  Rng rng(seed);
  EdgeField a(lattice);
  for (EdgeId e = 0; e < lattice.edge_count(); ++e) {
    a[e] = draw(law[lattice.direction(e)], uniform01(rng));
  }
  return Environment(std::move(a), law, seed);
}

Environment shift(const Environment& env, Vertex x) {
  const TorusLattice& lat = env.lattice();
  if (x >= lat.vertex_count()) throw ValidationError("shift vertex out of range");
  EdgeField out(lat);
  for (EdgeId e = 0; e < lat.edge_count(); ++e) out[e] = env[lat.translate_edge(e, x)];
  return Environment(std::move(out), env.law(), env.seed());
}

Environment resample_edge(const Environment& env, EdgeId e, std::uint64_t seed) {
  const TorusLattice& lat = env.lattice();
  if (e >= lat.edge_count()) throw ValidationError("edge out of range");
  EdgeField out = env.conductances();
  Rng rng(derive_seed(seed, e));
  out[e] = draw(env.law()[lat.direction(e)], uniform01(rng));
  return Environment(std::move(out), env.law(), env.seed());
}

ScalarField apply_generator(const Environment& env, const ScalarField& f) {
  return apply_generator(env.conductances(), f);
}

// ---------------------------------------------------------------------------

namespace {

double sup_cdf(const EnvironmentLaw& law, double s) {
  double prod = 1.0;
  for (const auto& l : law.directions) prod *= cdf(l, s);
  return prod;
}

// <S^-q> = 1 + int_0^1 q s^(-q-1) P(S <= s) ds for S = sup_i a(e_i) in [0, 1].
double sup_moment_quadrature(const EnvironmentLaw& law, double q) {
  std::vector<double> pts{0.0, 1.0};
  for (const auto& l : law.directions) {
    for (double b : cdf_breakpoints(l)) pts.push_back(b);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double f = sup_cdf(law, s);
    if (f == 0.0) return 0.0;
    return q * std::exp(-(q + 1.0) * std::log(s)) * f;
  };
  double total = 1.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    total += integrator.integrate(integrand, pts[k], pts[k + 1], 1e-12);
  }
  return total;
}

MomentVerdict sup_moment_monte_carlo(const EnvironmentLaw& law, double q, std::uint64_t seed,
                                     std::size_t draws) {
  MomentVerdict v;
  v.q = q;
  v.method = MomentMethod::kMonteCarlo;
  Rng rng(seed);
  double sum = 0.0;
  double max_term = 0.0;
  double half_estimate = 0.0;
  for (std::size_t n = 1; n <= draws; ++n) {
    double s = 0.0;
    for (const auto& l : law.directions) s = std::max(s, draw(l, uniform01(rng)));
    const double term = s > 0.0 ? std::pow(s, -q) : kInf;
    sum += term;
    max_term = std::max(max_term, term);
    if (n == draws / 2) half_estimate = sum / static_cast<double>(n);
  }
  const double estimate = sum / static_cast<double>(draws);
  // A heavy tail shows up as one draw dominating the sum or the running mean
  // still climbing over the second half of the run.
  v.diverging = !std::isfinite(estimate) || max_term > 0.05 * sum ||
                (half_estimate > 0.0 && estimate > 1.25 * half_estimate);
  v.pass = !v.diverging;
  if (std::isfinite(estimate)) v.value = estimate;
  v.reason = v.diverging ? "Monte-Carlo running estimate does not stabilize"
                         : "Monte-Carlo estimate stable";
  return v;
}

}  // namespace

std::vector<MomentVerdict> moment_condition_check(const EnvironmentLaw& law,
                                                  const std::vector<double>& q_list,
                                                  MomentMethod method, std::uint64_t seed,
                                                  std::size_t draws) {
  validate(law);
  for (double q : q_list) {
    if (!(q >= 1.0)) throw ValidationError("moment condition requires q >= 1");
  }
  double atom = 1.0;
  double exponent = 0.0;
  for (const auto& l : law.directions) {
    const ZeroTail tail = zero_tail(l);
    atom *= tail.atom;
    exponent += tail.exponent;
  }
  std::vector<MomentVerdict> out;
  for (double q : q_list) {
    if (method == MomentMethod::kMonteCarlo) {
      out.push_back(sup_moment_monte_carlo(law, q, seed, draws));
      continue;
    }
    MomentVerdict v;
    v.q = q;
    if (atom > 0.0) {
      v.pass = false;
      v.reason = "P[sup = 0] > 0";
    } else if (exponent <= q) {
      v.pass = false;
      std::ostringstream os;
      os << "P[sup <= s] ~ s^" << exponent << " with exponent <= q";
      v.reason = os.str();
    } else {
      try {
        v.value = sup_moment_quadrature(law, q);
        v.pass = std::isfinite(*v.value);
        v.reason = v.pass ? "finite" : "quadrature diverged";
      } catch (const std::exception&) {
        v = sup_moment_monte_carlo(law, q, seed, draws);
      }
    }
    out.push_back(v);
  }
  return out;
}

// ---------------------------------------------------------------------------

int LocalObservable::support_size() const {
  return std::visit(overloaded{
                        [](const CenteredConductance&) { return 1; },
                        [](const DivergenceForm& f) { return f.inner->support_size(); },
                    },
                    kind);
}

std::string LocalObservable::describe() const {
  return std::visit(overloaded{
                        [](const CenteredConductance& c) {
                          std::ostringstream os;
                          os << "CenteredConductance(offset=(";
                          for (int i = 0; i < kMaxDimension; ++i) {
                            if (i) os << ",";
                            os << c.offset[static_cast<std::size_t>(i)];
                          }
                          os << "),dir=" << c.direction << ")";
                          return os.str();
                        },
                        [](const DivergenceForm& f) {
                          return "DivergenceForm(dir=" + std::to_string(f.direction) + "," +
                                 f.inner->describe() + ")";
                        },
                    },
                    kind);
}

LocalObservable centered_conductance(int d) {
  Coords offset{};
  offset[0] = 1;
  (void)d;
  return centered_conductance(offset, 0);
}

LocalObservable centered_conductance(const Coords& offset, int direction) {
  return LocalObservable{CenteredConductance{offset, direction}};
}

LocalObservable divergence_form(int direction, LocalObservable inner) {
  return LocalObservable{
      DivergenceForm{direction, std::make_shared<const LocalObservable>(std::move(inner))}};
}

LocalObservable observable_from_json(const nlohmann::json& j, int d) {
  if (!j.is_object() || !j.contains("type")) {
    throw ValidationError("observable must be an object with a 'type'");
  }
  const std::string type = j.at("type").get<std::string>();
  if (type == "centered_conductance") {
    reject_unknown(j, {"type", "offset", "direction"}, "centered_conductance observable");
    Coords offset{};
    offset[0] = 1;
    if (j.contains("offset")) {
      const auto& arr = j.at("offset");
      if (!arr.is_array() || static_cast<int>(arr.size()) != d) {
        throw ValidationError("observable offset must be an array of length d");
      }
      offset = Coords{};
      for (int i = 0; i < d; ++i) offset[static_cast<std::size_t>(i)] = arr.at(static_cast<std::size_t>(i)).get<long>();
    }
    const int dir = j.value("direction", 0);
    if (dir < 0 || dir >= d) throw ValidationError("observable direction out of range");
    return centered_conductance(offset, dir);
  }
  if (type == "divergence_form") {
    reject_unknown(j, {"type", "direction", "inner"}, "divergence_form observable");
    const int dir = j.value("direction", 0);
    if (dir < 0 || dir >= d) throw ValidationError("observable direction out of range");
    LocalObservable inner = j.contains("inner")
                                ? observable_from_json(j.at("inner"), d)
                                : centered_conductance(d);
    return divergence_form(dir, std::move(inner));
  }
  throw ValidationError("unknown observable type '" + type + "'");
}

nlohmann::json to_json(const LocalObservable& obs, int d) {
  return std::visit(overloaded{
                        [d](const CenteredConductance& c) {
                          nlohmann::json off = nlohmann::json::array();
                          for (int i = 0; i < d; ++i) off.push_back(c.offset[static_cast<std::size_t>(i)]);
                          return nlohmann::json{{"type", "centered_conductance"},
                                                {"offset", off},
                                                {"direction", c.direction}};
                        },
                        [d](const DivergenceForm& f) {
                          return nlohmann::json{{"type", "divergence_form"},
                                                {"direction", f.direction},
                                                {"inner", to_json(*f.inner, d)}};
                        },
                    },
                    obs.kind);
}

ScalarField evaluate_observable(const LocalObservable& obs, const Environment& env) {
  const TorusLattice& lat = env.lattice();
  const int d = lat.dimension();
  return std::visit(
      overloaded{
          [&](const CenteredConductance& c) {
            if (c.direction < 0 || c.direction >= d) {
              throw ValidationError("observable direction out of range");
            }
            for (int i = 0; i < d; ++i) {
              const long o = c.offset[static_cast<std::size_t>(i)];
              const long top = o + (i == c.direction ? 1 : 0);
              if (std::abs(o) >= lat.side() || std::abs(top) >= lat.side()) {
                throw ValidationError("observable support exceeds the torus");
              }
            }
            const EdgeId base = lat.edge(lat.vertex(c.offset), c.direction);
            const double m = mean(env.law()[c.direction]);
            ScalarField g(lat);
            for (Vertex x = 0; x < lat.vertex_count(); ++x) {
              g[x] = env[lat.translate_edge(base, x)] - m;
            }
            return g;
          },
          [&](const DivergenceForm& f) {
            if (f.direction < 0 || f.direction >= d) {
              throw ValidationError("observable direction out of range");
            }
            const ScalarField inner = evaluate_observable(*f.inner, env);
            EdgeField flux(lat);
            for (Vertex x = 0; x < lat.vertex_count(); ++x) flux[lat.edge(x, f.direction)] = inner[x];
            return divergence(flux);
          },
      },
      obs.kind);
}

// ---------------------------------------------------------------------------

void write_environment(std::ostream& os, const Environment& env) {
  const TorusLattice& lat = env.lattice();
  nlohmann::json header{{"format_version", kEnvironmentFormatVersion},
                        {"d", lat.dimension()},
                        {"L", lat.side()},
                        {"seed", env.seed()},
                        {"law", to_json(env.law())}};
  os << "# rcm-environment " << header.dump() << "\n";
  os << "edge,conductance\n";
  char buf[64];
  for (EdgeId e = 0; e < lat.edge_count(); ++e) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e, env[e]);
    os << buf;
  }
}

Environment read_environment(std::istream& is) {
  std::string line;
  const std::string tag = "# rcm-environment ";
  if (!std::getline(is, line) || line.rfind(tag, 0) != 0) {
    throw ValidationError("missing rcm-environment header");
  }
  const auto header = nlohmann::json::parse(line.substr(tag.size()));
  if (header.at("format_version").get<int>() != kEnvironmentFormatVersion) {
    throw ValidationError("unsupported environment format version");
  }
  const TorusLattice lat = build_torus(header.at("d").get<int>(), header.at("L").get<long>());
  EnvironmentLaw law;
  for (const auto& l : header.at("law")) law.directions.push_back(law_from_json(l));
  if (!std::getline(is, line) || line != "edge,conductance") {
    throw ValidationError("missing environment column header");
  }
  std::vector<double> values(lat.edge_count(), 0.0);
  std::vector<bool> seen(lat.edge_count(), false);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("malformed environment row");
    const std::size_t e = std::stoull(line.substr(0, comma));
    if (e >= values.size() || seen[e]) throw ValidationError("bad or duplicate edge index");
    values[e] = std::stod(line.substr(comma + 1));
    seen[e] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ValidationError("environment file is missing edges");
  }
  return Environment(EdgeField(lat, std::move(values)), std::move(law),
                     header.at("seed").get<std::uint64_t>());
}

}  // namespace rcm
