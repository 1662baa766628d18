#include "rcm/experiment.hpp"

#include <openssl/sha.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "rcm/corrector.hpp"
#include "rcm/heat.hpp"
#include "rcm/relaxation.hpp"
#include "rcm/resistance.hpp"

namespace rcm {

using nlohmann::json;
namespace fs = std::filesystem;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRelax: return "relax";
    case ExperimentKind::kKernel: return "kernel";
    case ExperimentKind::kCorrector: return "corrector";
    case ExperimentKind::kWeights: return "weights";
    case ExperimentKind::kNecessity: return "necessity";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(const std::string& name) {
  for (auto k : {ExperimentKind::kRelax, ExperimentKind::kKernel, ExperimentKind::kCorrector,
                 ExperimentKind::kWeights, ExperimentKind::kNecessity}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += "; ";
    out += p;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> messages)
    : ValidationError("invalid config: " + join(messages)), messages_(std::move(messages)) {}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::set<std::string> allowed_keys(ExperimentKind kind) {
  std::set<std::string> keys{"schema_version", "experiment", "d", "L", "seed", "reps", "threads", "output"};
  auto add = [&](std::initializer_list<const char*> more) {
    for (const char* k : more) keys.insert(k);
  };
  switch (kind) {
    case ExperimentKind::kRelax:
      add({"law", "observable", "moments", "dt", "times", "t_min", "t_max", "num_times", "fit_window",
           "project_zero_mode"});
      break;
    case ExperimentKind::kKernel:
      add({"law", "dt", "times", "t_min", "t_max", "num_times", "fit_window"});
      break;
    case ExperimentKind::kCorrector:
      add({"law", "direction", "mu", "moments", "tol", "precondition"});
      break;
    case ExperimentKind::kWeights:
      add({"law", "q", "moderation_q", "r_exponent"});
      break;
    case ExperimentKind::kNecessity:
      add({"theta", "q", "dt", "times", "t_min", "t_max", "num_times", "control_law"});
      break;
  }
  return keys;
}

class Reader {
 public:
  Reader(const json& doc, std::vector<std::string>& errors) : doc_(doc), errors_(errors) {}

  bool has(const char* key) const { return doc_.contains(key); }

  std::optional<double> number(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_number()) {
      errors_.push_back(std::string("'") + key + "' must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long> integer(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_number_integer()) {
      errors_.push_back(std::string("'") + key + "' must be an integer");
      return std::nullopt;
    }
    return v.get<long>();
  }

  std::optional<bool> boolean(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_boolean()) {
      errors_.push_back(std::string("'") + key + "' must be true or false");
      return std::nullopt;
    }
    return v.get<bool>();
  }

  std::optional<std::string> string(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!v.is_string()) {
      errors_.push_back(std::string("'") + key + "' must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  // Accepts a number or an array of numbers.
  std::optional<std::vector<double>> numbers(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (v.is_number()) return std::vector<double>{v.get<double>()};
    if (!v.is_array()) {
      errors_.push_back(std::string("'") + key + "' must be a number or an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) {
        errors_.push_back(std::string("'") + key + "' must contain only numbers");
        return std::nullopt;
      }
      out.push_back(x.get<double>());
    }
    return out;
  }

  const json& raw(const char* key) const { return doc_.at(key); }

 private:
  const json& doc_;
  std::vector<std::string>& errors_;
};

std::optional<EnvironmentLaw> parse_law(const json& j, int d, const char* key, std::vector<std::string>& errors) {
  try {
    EnvironmentLaw law;
    if (j.is_object()) {
      law = EnvironmentLaw::isotropic(law_from_json(j), d);
    } else if (j.is_array()) {
      if (static_cast<int>(j.size()) != d) {
        errors.push_back(std::string("'") + key + "' array must have one law per direction (d = " +
                         std::to_string(d) + ")");
        return std::nullopt;
      }
      for (const auto& l : j) law.directions.push_back(law_from_json(l));
    } else {
      errors.push_back(std::string("'") + key + "' must be a law object or an array of d law objects");
      return std::nullopt;
    }
    return law;
  } catch (const std::exception& ex) {
    errors.push_back(std::string("'") + key + "': " + ex.what());
    return std::nullopt;
  }
}

long default_reps(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kRelax: return 20;
    case ExperimentKind::kKernel: return 1;
    case ExperimentKind::kCorrector: return 10;
    case ExperimentKind::kWeights: return 100;
    case ExperimentKind::kNecessity: return 20;
  }
  return 1;
}

bool evolves(ExperimentKind kind) {
  return kind == ExperimentKind::kRelax || kind == ExperimentKind::kKernel || kind == ExperimentKind::kNecessity;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> kind) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError({std::string("config is not valid JSON: ") + ex.what()});
  }
  return parse_config(doc, kind);
}

ExperimentConfig parse_config(const json& doc, std::optional<ExperimentKind> kind) {
  std::vector<std::string> errors;
  if (!doc.is_object()) throw ConfigError({"config must be a JSON object"});
  Reader in(doc, errors);
  ExperimentConfig cfg;

  if (auto v = in.integer("schema_version")) {
    if (*v != kConfigSchemaVersion) {
      errors.push_back("unsupported schema_version " + std::to_string(*v) + " (expected " +
                       std::to_string(kConfigSchemaVersion) + ")");
    }
  } else if (!in.has("schema_version")) {
    errors.push_back("missing required key 'schema_version'");
  }

  std::optional<ExperimentKind> named;
  if (auto s = in.string("experiment")) {
    named = parse_kind(*s);
    if (!named) errors.push_back("unknown experiment '" + *s + "'");
  }
  if (kind && named && *kind != *named) {
    errors.push_back(std::string("config names experiment '") + to_string(*named) +
                     "' but the command requested '" + to_string(*kind) + "'");
  }
  if (!kind && !named) {
    errors.push_back("missing experiment kind (give a subcommand or an 'experiment' key)");
    throw ConfigError(errors);
  }
  cfg.kind = kind ? *kind : *named;
  const std::set<std::string> allowed = allowed_keys(cfg.kind);
  for (const auto& [key, value] : doc.items()) {
    if (!allowed.count(key)) {
      errors.push_back("unknown key '" + key + "' for experiment '" + to_string(cfg.kind) + "'");
    }
  }

  // Lattice.
  bool lattice_ok = true;
  if (auto v = in.integer("d")) {
    cfg.d = static_cast<int>(*v);
    if (*v < 1 || *v > kMaxDimension) {
      errors.push_back("d must lie in [1, " + std::to_string(kMaxDimension) + "]");
      lattice_ok = false;
    }
  } else {
    if (!in.has("d")) errors.push_back("missing required key 'd'");
    lattice_ok = false;
  }
  const long default_L = cfg.kind == ExperimentKind::kNecessity ? 32 : 0;
  if (auto v = in.integer("L")) {
    cfg.L = *v;
  } else if (!in.has("L") && default_L > 0) {
    cfg.L = default_L;
  } else {
    if (!in.has("L")) errors.push_back("missing required key 'L'");
    lattice_ok = false;
  }
  if (lattice_ok && cfg.L < 3) {
    errors.push_back("L = " + std::to_string(cfg.L) + " violates L >= 3 (edges must stay simple under periodic wrap)");
    lattice_ok = false;
  }
  if (lattice_ok) {
    const double vertices = std::pow(static_cast<double>(cfg.L), cfg.d);
    if (vertices > static_cast<double>(kMaxVertices)) {
      errors.push_back("L^d = " + std::to_string(static_cast<long long>(vertices)) +
                       " exceeds the memory cap of 2^24 vertices");
      lattice_ok = false;
    } else if (evolves(cfg.kind) && ((cfg.d == 2 && cfg.L > 256) || (cfg.d == 3 && cfg.L > 64))) {
      errors.push_back("L exceeds the evolution cap (256 for d = 2, 64 for d = 3)");
      lattice_ok = false;
    }
  }

  // Law.
  if (cfg.kind != ExperimentKind::kNecessity) {
    if (!in.has("law")) {
      errors.push_back("missing required key 'law'");
    } else if (lattice_ok) {
      if (auto law = parse_law(in.raw("law"), cfg.d, "law", errors)) cfg.law = *law;
    }
  }

  // Ensemble and output.
  if (auto v = in.integer("seed")) {
    if (*v < 0) errors.push_back("seed must be nonnegative");
    cfg.seed = static_cast<std::uint64_t>(*v);
  }
  cfg.reps = static_cast<std::size_t>(default_reps(cfg.kind));
  if (auto v = in.integer("reps")) {
    const long min_reps = cfg.kind == ExperimentKind::kRelax || cfg.kind == ExperimentKind::kNecessity ? 2 : 1;
    if (*v < min_reps) {
      errors.push_back("reps must be >= " + std::to_string(min_reps));
    } else {
      cfg.reps = static_cast<std::size_t>(*v);
    }
  }
  if (auto v = in.integer("threads")) {
    if (*v < 0) errors.push_back("threads must be >= 0 (0 = all cores)");
    cfg.threads = static_cast<int>(*v);
  }
  if (auto v = in.string("output")) cfg.output = *v;

  // Time grid. Needs only d; the L-dependent defaults fall back to L = 16.
  const bool dimension_ok = cfg.d >= 1 && cfg.d <= kMaxDimension;
  if (evolves(cfg.kind) && dimension_ok) {
    const double finite_size = std::pow(static_cast<double>(cfg.L >= 3 ? cfg.L : 16) / 4.0, 2);
    cfg.dt = default_dt(cfg.d);
    if (auto v = in.number("dt")) cfg.dt = *v;
    if (auto v = in.numbers("times")) {
      cfg.times = *v;
      for (const char* k : {"t_min", "t_max", "num_times"}) {
        if (in.has(k)) errors.push_back(std::string("'times' and '") + k + "' are mutually exclusive");
      }
    } else {
      double t_min = cfg.kind == ExperimentKind::kNecessity ? 4.0 : 1.0;
      double t_max = cfg.kind == ExperimentKind::kNecessity ? 64.0 : std::max(4.0, finite_size);
      long count = cfg.kind == ExperimentKind::kNecessity ? 9 : 16;
      if (auto v = in.number("t_min")) t_min = *v;
      if (auto v = in.number("t_max")) t_max = *v;
      if (auto v = in.integer("num_times")) count = *v;
      try {
        cfg.times = log_spaced_times(t_min, t_max, static_cast<int>(count),
                                     cfg.kind != ExperimentKind::kNecessity);
      } catch (const std::exception& ex) {
        errors.push_back(ex.what());
      }
    }
    try {
      const EvolutionParams params = make_evolution_params(cfg.d, cfg.dt, cfg.times);
      // Re-store the snapped grid; duplicates from snapping a log grid are dropped.
      cfg.times = params.times;
      if (lattice_ok) {
        if (auto w = wraparound_warning(params, TorusLattice(cfg.d, cfg.L))) cfg.warnings.push_back(*w);
      }
    } catch (const ValidationError& ex) {
      std::vector<double> dedup;
      const double dt = cfg.dt;
      bool only_collisions = dt > 0.0 && dt <= 1.0 / (2.0 * cfg.d) * (1.0 + 1e-12);
      for (double t : cfg.times) {
        if (!(t >= 0.0)) only_collisions = false;
        const double snapped = std::round(t / dt) * dt;
        if (dedup.empty() || snapped > dedup.back()) dedup.push_back(snapped);
        else if (snapped < dedup.back()) only_collisions = false;
      }
      if (only_collisions && !in.has("times")) {
        cfg.times = dedup;
      } else {
        errors.push_back(ex.what());
      }
    }
    if (cfg.kind != ExperimentKind::kNecessity) {
      cfg.fit_lo = 4.0;
      cfg.fit_hi = finite_size;
      if (auto v = in.numbers("fit_window")) {
        if (v->size() != 2 || !((*v)[0] > 0.0 && (*v)[1] > (*v)[0])) {
          errors.push_back("'fit_window' must be [t_lo, t_hi] with 0 < t_lo < t_hi");
        } else {
          cfg.fit_lo = (*v)[0];
          cfg.fit_hi = (*v)[1];
        }
      }
    }
  }

  switch (cfg.kind) {
    case ExperimentKind::kRelax: {
      cfg.moments = {1.0};
      if (auto v = in.numbers("moments")) cfg.moments = *v;
      for (double p : cfg.moments) {
        if (!(p >= 1.0)) errors.push_back("moment orders p must be >= 1");
      }
      if (lattice_ok) {
        try {
          cfg.observable = in.has("observable") ? observable_from_json(in.raw("observable"), cfg.d)
                                                : centered_conductance(cfg.d);
        } catch (const std::exception& ex) {
          errors.push_back(std::string("'observable': ") + ex.what());
        }
      }
      if (auto v = in.boolean("project_zero_mode")) cfg.project_zero_mode = *v;
      break;
    }
    case ExperimentKind::kKernel:
      break;
    case ExperimentKind::kCorrector: {
      if (auto v = in.integer("direction")) {
        cfg.direction = static_cast<int>(*v);
        if (lattice_ok && (*v < 0 || *v >= cfg.d)) errors.push_back("direction must lie in [0, d)");
      }
      cfg.mu = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
      if (auto v = in.numbers("mu")) cfg.mu = *v;
      for (double m : cfg.mu) {
        if (!(m > 0.0)) errors.push_back("mu values must be positive");
      }
      cfg.moments = {2.0};
      if (auto v = in.numbers("moments")) cfg.moments = *v;
      for (double p : cfg.moments) {
        if (!(p > 0.0)) errors.push_back("corrector moment orders must be positive");
      }
      if (auto v = in.number("tol")) {
        if (!(*v > 0.0)) errors.push_back("tol must be positive");
        cfg.tol = *v;
      }
      if (auto v = in.boolean("precondition")) cfg.precondition = *v;
      break;
    }
    case ExperimentKind::kWeights: {
      cfg.q = {1.0, 2.0, 4.0};
      if (auto v = in.numbers("q")) cfg.q = *v;
      for (double q : cfg.q) {
        if (!(q >= 1.0)) errors.push_back("weight moment orders q must be >= 1");
      }
      cfg.moderation_q = cfg.d + 1.0;
      if (auto v = in.number("moderation_q")) {
        if (!(*v > 0.0)) errors.push_back("moderation_q must be positive");
        cfg.moderation_q = *v;
      }
      if (auto v = in.number("r_exponent")) {
        if (!(*v > 0.0)) errors.push_back("r_exponent must be positive");
        cfg.r_exponent = *v;
      }
      break;
    }
    case ExperimentKind::kNecessity: {
      if (lattice_ok) {
        cfg.theta.assign(static_cast<std::size_t>(cfg.d), 0.25);
        if (auto v = in.numbers("theta")) {
          if (v->size() == 1) {
            cfg.theta.assign(static_cast<std::size_t>(cfg.d), v->front());
          } else if (static_cast<int>(v->size()) == cfg.d) {
            cfg.theta = *v;
          } else {
            errors.push_back("'theta' must be a number or an array of d numbers");
          }
        }
        for (double th : cfg.theta) {
          if (!(th > 0.0)) errors.push_back("theta values must be positive");
        }
        if (in.has("control_law")) {
          if (auto law = parse_law(in.raw("control_law"), cfg.d, "control_law", errors)) cfg.control_law = *law;
        }
      }
      if (auto v = in.number("q")) {
        if (!(*v >= 1.0)) errors.push_back("necessity moment order q must be >= 1");
        cfg.necessity_q = *v;
      }
      if (cfg.times.size() < 2 || (!cfg.times.empty() && cfg.times.front() <= 0.0)) {
        errors.push_back("necessity needs at least two positive ladder times");
      }
      break;
    }
  }

  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

json ExperimentConfig::echo() const {
  json j;
  j["schema_version"] = schema_version;
  j["experiment"] = to_string(kind);
  j["d"] = d;
  j["L"] = L;
  j["seed"] = seed;
  j["reps"] = reps;
  j["threads"] = threads;
  j["output"] = output;
  if (kind != ExperimentKind::kNecessity) j["law"] = to_json(law);
  if (evolves(kind)) {
    j["dt"] = dt;
    j["times"] = times;
  }
  switch (kind) {
    case ExperimentKind::kRelax:
      j["moments"] = moments;
      j["observable"] = to_json(*observable, d);
      j["fit_window"] = {fit_lo, fit_hi};
      j["project_zero_mode"] = project_zero_mode;
      break;
    case ExperimentKind::kKernel:
      j["fit_window"] = {fit_lo, fit_hi};
      break;
    case ExperimentKind::kCorrector:
      j["direction"] = direction;
      j["mu"] = mu;
      j["moments"] = moments;
      j["tol"] = tol;
      j["precondition"] = precondition;
      break;
    case ExperimentKind::kWeights:
      j["q"] = q;
      j["moderation_q"] = moderation_q;
      j["r_exponent"] = r_exponent;
      break;
    case ExperimentKind::kNecessity:
      j["theta"] = theta;
      j["q"] = necessity_q;
      if (control_law) j["control_law"] = to_json(*control_law);
      break;
  }
  return j;
}

std::string git_blob_hash(const std::string& bytes) {
  const std::string blob = "blob " + std::to_string(bytes.size()) + std::string(1, '\0') + bytes;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char c : digest) {
    out += hex[c >> 4];
    out += hex[c & 15];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class CsvFile {
 public:
  CsvFile(const fs::path& path, const std::string& header, RunReport& report) : path_(path), os_(path) {
    if (!os_) throw Error("cannot open " + path.string() + " for writing");
    os_ << header << "\n";
    report.outputs.push_back(path);
  }
  template <class... Cols>
  void row(const Cols&... cols) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cols), first = false), ...);
    os_ << "\n";
  }
  ~CsvFile() = default;

 private:
  static std::string cell(double x) { return fmt(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(long x) { return std::to_string(x); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }

  fs::path path_;
  std::ofstream os_;
};

json verdicts_json(const std::vector<MomentVerdict>& verdicts) {
  json arr = json::array();
  for (const auto& v : verdicts) {
    json j{{"q", v.q}, {"verdict", v.pass ? "PASS" : "FAIL"}, {"reason", v.reason}};
    if (v.value) j["value"] = *v.value;
    arr.push_back(j);
  }
  return arr;
}

std::string series_id(double p) { return "p=" + fmt(p); }

json fit_json(const DecayFit& f) {
  return json{{"exponent", f.exponent}, {"stderr", f.stderr_}, {"window_lo", f.t_lo},
              {"window_hi", f.t_hi},     {"r2", f.r2},          {"points", f.points}};
}

void run_relax(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
  RelaxationSpec spec;
  spec.law = cfg.law;
  spec.L = cfg.L;
  spec.observable = *cfg.observable;
  spec.p_list = cfg.moments;
  spec.params = make_evolution_params(cfg.d, cfg.dt, cfg.times);
  spec.reps = cfg.reps;
  spec.seed = cfg.seed;
  spec.threads = cfg.threads;
  spec.project_zero_mode = cfg.project_zero_mode;
  const RelaxationResult res = run_relaxation(spec);

  {
    CsvFile csv(dir / "moments.csv", "t,p,moment,stderr,reps", report);
    for (const auto& s : res.series) {
      for (const auto& e : s.entries) csv.row(e.t, s.p, e.moment, e.stderr_, s.reps);
    }
  }
  json fits = json::array();
  {
    CsvFile csv(dir / "fits.csv", "series_id,exponent,stderr,window_lo,window_hi,r2", report);
    for (const auto& s : res.series) {
      std::optional<double> exponent;
      try {
        const DecayFit f = fit_decay(s, cfg.fit_lo, cfg.fit_hi);
        csv.row(series_id(s.p), f.exponent, f.stderr_, f.t_lo, f.t_hi, f.r2);
        json fj = fit_json(f);
        fj["series_id"] = series_id(s.p);
        fits.push_back(fj);
        exponent = f.exponent;
      } catch (const ValidationError& ex) {
        fits.push_back(json{{"series_id", series_id(s.p)}, {"error", ex.what()}});
      }
      std::vector<double> t, v;
      for (const auto& e : s.entries) {
        t.push_back(e.t);
        v.push_back(e.moment);
      }
      const fs::path plot = dir / ("plot_p" + fmt(s.p) + ".dat");
      emit_plot_data(t, v, plot, exponent);
      report.outputs.push_back(plot);
    }
  }
  const std::vector<bool> dissipation = dissipation_check(res.series);
  json diss = json::array();
  for (std::size_t j = 0; j < res.series.size(); ++j) {
    diss.push_back(json{{"p", res.series[j].p}, {"non_increasing", static_cast<bool>(dissipation[j])}});
  }
  report.manifest["moment_condition"] = verdicts_json(res.moment_condition);
  report.manifest["moment_condition_verdict"] = res.moment_condition_pass ? "PASS" : "FAIL";
  report.manifest["fits"] = fits;
  report.manifest["dissipation"] = diss;
}

void run_kernel(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
  const TorusLattice lat = build_torus(cfg.d, cfg.L);
  const Environment env = sample_environment(cfg.law, lat, derive_seed(cfg.seed, 0));
  const EvolutionParams params = make_evolution_params(cfg.d, cfg.dt, cfg.times);
  const auto series = on_diagonal_series(env, params);
  std::vector<double> t, v;
  {
    CsvFile csv(dir / "kernel.csv", "t,p00,mass,l2_half_identity_gap", report);
    for (const auto& pt : series) {
      csv.row(pt.t, pt.p00, pt.mass, pt.half_identity_gap);
      t.push_back(pt.t);
      v.push_back(pt.p00);
    }
  }
  std::optional<double> exponent;
  {
    CsvFile csv(dir / "fits.csv", "series_id,exponent,stderr,window_lo,window_hi,r2", report);
    try {
      const DecayFit f = fit_power_law(t, v, cfg.fit_lo, cfg.fit_hi);
      csv.row(std::string("p00"), f.exponent, f.stderr_, f.t_lo, f.t_hi, f.r2);
      report.manifest["fit"] = fit_json(f);
      exponent = f.exponent;
    } catch (const ValidationError& ex) {
      report.manifest["fit"] = json{{"error", ex.what()}};
    }
  }
  const fs::path plot = dir / "plot_kernel.dat";
  emit_plot_data(t, v, plot, exponent);
  report.outputs.push_back(plot);
  report.manifest["moment_condition"] = verdicts_json(moment_condition_check(cfg.law, {1.0}));
}

void run_corrector(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
  CorrectorSweepSpec spec;
  spec.law = cfg.law;
  spec.L = cfg.L;
  spec.direction = cfg.direction;
  spec.mu_list = cfg.mu;
  spec.p_list = cfg.moments;
  spec.reps = cfg.reps;
  spec.seed = cfg.seed;
  spec.options.tol = cfg.tol;
  spec.options.precondition = cfg.precondition;
  spec.threads = cfg.threads;
  const auto rows = corrector_moment_sweep(spec);
  CsvFile csv(dir / "corrector.csv", "mu,p,moment_estimate,stderr,reps_used,nonconverged_count", report);
  for (const auto& r : rows) csv.row(r.mu, r.p, r.moment, r.stderr_, r.reps_used, r.nonconverged);
  report.manifest["moment_condition"] = verdicts_json(moment_condition_check(cfg.law, {1.0}));
}

void run_weights(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
  const TorusLattice lat = build_torus(cfg.d, cfg.L);
  const Environment env = sample_environment(cfg.law, lat, derive_seed(cfg.seed, 0));
  std::size_t disconnected = 0;
  std::size_t exhausted = 0;
  std::vector<PathCertificate> certs(lat.edge_count());
  bool complete = true;
  {
    CsvFile csv(dir / "certificates.csv", "edge,w,path_len,provenance", report);
    ResistanceSolver solver(env);
    for (EdgeId e = 0; e < lat.edge_count(); ++e) {
      try {
        certs[e] = solver.certify(e);
        csv.row(e, certs[e].weight, certs[e].path.size(), to_string(certs[e].provenance));
      } catch (const DisconnectedError&) {
        ++disconnected;
        complete = false;
      }
      try {
        const PathCertificate det = detour_path(env, e);
        csv.row(e, det.weight, det.path.size(), to_string(det.provenance));
      } catch (const ScanExhaustedError&) {
        ++exhausted;
      }
    }
  }
  const WeightMomentReport moments = weight_moment_estimate(cfg.law, cfg.L, cfg.q, cfg.reps, cfg.seed, cfg.threads);
  {
    CsvFile csv(dir / "weight_moments.csv", "q,mean,stderr,fail_count", report);
    for (const auto& r : moments.rows) csv.row(r.q, r.weight_mean, r.weight_stderr, moments.fail_count);
  }
  {
    CsvFile csv(dir / "path_moments.csv", "q,mean,stderr,fail_count", report);
    for (const auto& r : moments.rows) csv.row(r.q, r.length_mean, r.length_stderr, moments.fail_count);
  }
  json moderation;
  if (complete) {
    const ModerationStatistic m = compute_moderation(lat, certs, cfg.moderation_q, cfg.r_exponent);
    moderation = json{{"q", m.q}, {"r_exponent", m.r_exponent}, {"value", m.value},
                      {"maximizing_radius", m.maximizing_radius}};
  } else {
    moderation = json{{"error", "environment has disconnected edges"}};
  }
  report.manifest["moderation"] = moderation;
  report.manifest["disconnected_edges"] = disconnected;
  report.manifest["detour_scan_exhausted"] = exhausted;
  report.manifest["moment_condition_flagged"] = moments.flagged;
  report.manifest["moment_condition"] = verdicts_json(moment_condition_check(cfg.law, cfg.q));
}

void run_necessity(const ExperimentConfig& cfg, const fs::path& dir, RunReport& report) {
  NecessityConfig nc;
  nc.theta = cfg.theta;
  nc.q = cfg.necessity_q;
  nc.times = cfg.times;
  nc.L = cfg.L;
  nc.dt = cfg.dt;
  nc.reps = cfg.reps;
  nc.seed = cfg.seed;
  nc.threads = cfg.threads;
  const NecessityResult res = necessity_experiment(nc);
  std::vector<double> t, v;
  {
    CsvFile csv(dir / "necessity.csv", "t,q,S,stderr,reps", report);
    for (const auto& r : res.rows) {
      csv.row(r.t, nc.q, r.value, r.stderr_, nc.reps);
      t.push_back(r.t);
      v.push_back(r.value);
    }
  }
  const fs::path plot = dir / "plot_necessity.dat";
  emit_plot_data(t, v, plot);
  report.outputs.push_back(plot);
  report.manifest["p0"] = res.p0;
  report.manifest["critical_q"] = res.critical_q;
  report.manifest["growth_ratio"] = res.growth_ratio;
  report.manifest["growth_witnessed"] = res.growth_witnessed;
  report.manifest["moment_condition_verdict"] = res.moment_condition_fails ? "FAIL" : "PASS";

  if (cfg.control_law) {
    RelaxationSpec spec;
    spec.law = *cfg.control_law;
    spec.L = cfg.L;
    spec.observable = centered_conductance(cfg.d);
    spec.p_list = {1.0};
    spec.params = make_evolution_params(cfg.d, cfg.dt, cfg.times);
    spec.reps = cfg.reps;
    spec.seed = cfg.seed;
    spec.threads = cfg.threads;
    const RelaxationResult ctl = run_relaxation(spec);
    const auto rows = scaled_statistic(ctl.series.front(), cfg.d);
    CsvFile csv(dir / "control.csv", "t,q,S,stderr,reps", report);
    double lo = rows.front().value, hi = rows.front().value;
    for (const auto& r : rows) {
      csv.row(r.t, 1.0, r.value, r.stderr_, cfg.reps);
      lo = std::min(lo, r.value);
      hi = std::max(hi, r.value);
    }
    report.manifest["control_band_ratio"] = lo > 0.0 ? hi / lo : 0.0;
    report.manifest["control_moment_condition_verdict"] = ctl.moment_condition_pass ? "PASS" : "FAIL";
  }
}

}  // namespace

PlotDataReport emit_plot_data(const std::vector<double>& t, const std::vector<double>& value, const fs::path& path,
                              std::optional<double> exponent) {
  if (t.empty() || t.size() != value.size()) throw ValidationError("plot data needs a nonempty series");
  PlotDataReport report;
  std::vector<double> tt, vv;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && value[i] > 0.0) {
      tt.push_back(t[i]);
      vv.push_back(value[i]);
    } else {
      ++report.dropped;
    }
  }
  report.exponent = exponent;
  if (!report.exponent && tt.size() >= 4) {
    try {
      report.exponent = fit_power_law(tt, vv, tt.front(), tt.back()).exponent;
    } catch (const ValidationError&) {
    }
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path.string() + " for writing");
  os << "# log10(t) log10(value)\n";
  os << "# fitted_exponent " << (report.exponent ? fmt(*report.exponent) : std::string("n/a")) << "\n";
  if (report.dropped > 0) os << "# dropped_nonpositive " << report.dropped << "\n";
  for (std::size_t i = 0; i < tt.size(); ++i) {
    os << fmt(std::log10(tt[i])) << " " << fmt(std::log10(vv[i])) << "\n";
  }
  if (!os) throw Error("write failed for " + path.string());
  report.rows = tt.size();
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(cfg.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  RunReport report;
  switch (cfg.kind) {
    case ExperimentKind::kRelax: run_relax(cfg, dir, report); break;
    case ExperimentKind::kKernel: run_kernel(cfg, dir, report); break;
    case ExperimentKind::kCorrector: run_corrector(cfg, dir, report); break;
    case ExperimentKind::kWeights: run_weights(cfg, dir, report); break;
    case ExperimentKind::kNecessity: run_necessity(cfg, dir, report); break;
  }
  const json echo = cfg.echo();
  report.manifest["experiment"] = to_string(cfg.kind);
  report.manifest["config"] = echo;
  report.manifest["config_hash"] = git_blob_hash(echo.dump());
  report.manifest["warnings"] = cfg.warnings;
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.manifest["wall_time_seconds"] = wall;
  json outputs = json::array();
  for (const auto& p : report.outputs) outputs.push_back(p.filename().string());
  report.manifest["outputs"] = outputs;

  const fs::path manifest = dir / "manifest.json";
  std::ofstream os(manifest);
  if (!os) throw Error("cannot write " + manifest.string());
  os << report.manifest.dump(2) << "\n";
  report.outputs.push_back(manifest);
  return report;
}

}  // namespace rcm
