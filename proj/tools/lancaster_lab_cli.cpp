// Command-line front end: build | chain | verify | scan | spectrum | quadrature-dump.
//
// Every key may come from a flag (--key value) or from a JSON object passed
// with --config, which wins. The output carries the fully resolved config.
// Exit codes: 0 success (verdicts live in the JSON), 2 validation, 3 sampler
// failure, 4 resource budget.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lancaster_lab/gibbs.hpp"
#include "lancaster_lab/lancaster.hpp"
#include "lancaster_lab/serialize.hpp"
#include "lancaster_lab/triplekernel.hpp"

using namespace lancaster_lab;

namespace {

struct CliError {
  int exit_code;
  std::string code;
  std::string message;
  std::string field;
};

[[noreturn]] void invalid(const std::string& code, const std::string& message, const std::string& field = {}) {
  throw CliError{2, code, message, field};
}

enum class Kind { text, real, integer, u64 };

const std::map<std::string, Kind, std::less<>> kKinds{
    {"family", Kind::text},  {"model", Kind::text},      {"measure", Kind::text},  {"nef", Kind::text},
    {"kind", Kind::text},    {"case", Kind::text},       {"series", Kind::text},   {"trace", Kind::text},
    {"csv", Kind::text},     {"N", Kind::integer},       {"n", Kind::integer},     {"steps", Kind::integer},
    {"grid", Kind::integer}, {"degree", Kind::integer},  {"max_degree", Kind::integer},
    {"max_lag", Kind::integer}, {"resolution", Kind::integer}, {"nodes", Kind::integer},
    {"seed", Kind::u64},
};

Kind kind_of(const std::string& key) {
  const auto it = kKinds.find(key);
  return it == kKinds.end() ? Kind::real : it->second;
}

const std::vector<std::string> kMeasureParams{"n", "p", "a", "b", "q", "mean", "variance", "shape", "scale"};

std::map<std::string, std::vector<std::string>> command_keys() {
  const std::vector<std::string> sequence{"family", "N", "a", "b", "n", "q", "r", "t", "lambda",
                                          "eta",    "xi", "z", "nef", "kind"};
  const std::vector<std::string> model{"model", "n", "a", "b", "x0", "lambda", "q", "r"};
  auto join = [](std::vector<std::string> a, std::vector<std::string> b) {
    b.push_back("seed");
    for (const auto& k : b) {
      if (std::find(a.begin(), a.end(), k) == a.end()) a.push_back(k);
    }
    return a;
  };
  return {
      {"build", join(sequence, {})},
      {"verify", join(sequence, {"case"})},
      {"chain", join(model, {"start", "steps", "degree", "max_lag", "trace"})},
      {"spectrum", join(model, {"degree", "max_degree", "resolution"})},
      {"scan", join({"measure"}, join(kMeasureParams, {"N", "grid", "series", "tolerance", "x0", "csv"}))},
      {"quadrature-dump", join({"measure"}, join(kMeasureParams, {"nodes", "csv"}))},
  };
}

Json convert(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    switch (kind_of(key)) {
      case Kind::text:
        return text;
      case Kind::real:
        return parse_real(text);
      case Kind::integer: {
        const long v = std::stol(text, &used);
        if (used != text.size()) break;
        return v;
      }
      case Kind::u64: {
        if (!text.empty() && text[0] == '-') break;
        const unsigned long long v = std::stoull(text, &used);
        if (used != text.size()) break;
        return v;
      }
    }
  } catch (const std::exception&) {
  }
  invalid("invalid_value", "cannot parse '" + text + "' for " + key, key);
}

void check_type(const std::string& key, const Json& value) {
  bool ok = false;
  switch (kind_of(key)) {
    case Kind::text: ok = value.is_string(); break;
    case Kind::real: ok = value.is_number(); break;
    case Kind::integer: ok = value.is_number_integer(); break;
    case Kind::u64: ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<long>() >= 0); break;
  }
  if (!ok) invalid("invalid_value", "wrong type for " + key, key);
}

// Given values plus the resolved echo, filled in as handlers read keys.
class Config {
 public:
  explicit Config(Json given) : given_(std::move(given)), resolved_(Json::object()) {}

  bool has(const std::string& key) const { return given_.contains(key); }

  double real(const std::string& key, std::optional<double> fallback = std::nullopt) {
    return get<double>(key, fallback);
  }
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const long v = get<long>(key, fallback ? std::optional<long>(*fallback) : std::nullopt);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      invalid("invalid_value", key + " is out of range", key);
    }
    return static_cast<int>(v);
  }
  std::uint64_t u64(const std::string& key, std::optional<std::uint64_t> fallback = std::nullopt) {
    return get<std::uint64_t>(key, fallback);
  }
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    return get<std::string>(key, fallback);
  }
  /// Absent optional keys are echoed as null.
  std::optional<std::string> optional_text(const std::string& key) {
    if (!has(key)) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    return text(key);
  }
  std::optional<double> optional_real(const std::string& key) {
    if (!has(key)) {
      resolved_[key] = nullptr;
      return std::nullopt;
    }
    return real(key);
  }
  void set(const std::string& key, Json value) {
    used_.insert(key);
    resolved_[key] = std::move(value);
  }

  void reject_unused() const {
    for (const auto& [key, value] : given_.items()) {
      if (!used_.count(key)) invalid("unused_key", key + " does not apply to this configuration", key);
    }
  }
  const Json& resolved() const { return resolved_; }

 private:
  template <class T>
  T get(const std::string& key, std::optional<T> fallback) {
    used_.insert(key);
    T value;
    if (given_.contains(key)) {
      value = given_.at(key).get<T>();
    } else if (fallback) {
      value = *fallback;
    } else {
      invalid("missing_parameter", "missing required parameter " + key, key);
    }
    resolved_[key] = value;
    return value;
  }

  Json given_;
  Json resolved_;
  std::set<std::string> used_;
};

std::string underscored(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  return name;
}

LancasterSequence build_sequence(Config& c, int N) {
  const std::string family = c.text("family");
  if (family == "buja") {
    const double a = c.real("a"), b = c.real("b");
    return seq_buja(a, b, N);
  }
  if (family == "beta-binomial") {
    const int n = c.integer("n");
    const double a = c.real("a"), b = c.real("b");
    return seq_beta_binomial(n, a, b);
  }
  if (family == "kibble") {
    const double q = c.real("q"), r = c.real("r");
    return seq_kibble(q, r, N);
  }
  if (family == "hyperbolic-beta") {
    const double q = c.real("q"), eta = c.real("eta");
    return seq_hyperbolic_beta(q, eta, N).sequence;
  }
  if (family == "hyperbolic") {
    // t^n on hyperbolic margins, which is never Lancaster for t in (0, 1)
    const double q = c.real("q", 1.0), t = c.real("t");
    if (!(t >= -1.0 && t <= 1.0)) fail(ErrorCode::t_out_of_range, "t must lie in [-1, 1]");
    LancasterSequence seq;
    seq.margin_x = seq.margin_y = Measure::hyperbolic(q);
    seq.rho.assign(N + 1, 1.0);
    for (int n = 1; n <= N; ++n) seq.rho[n] = seq.rho[n - 1] * t;
    seq.provenance = "geometric";
    return seq;
  }
  if (family == "geometric-cross") {
    const std::string kind = c.text("kind");
    Params params{{"a", c.real("a")}};
    CrossKind ck;
    if (kind == "poisson") {
      ck = CrossKind::poisson;
      params.set("b", c.real("b"));
    } else if (kind == "negbin") {
      ck = CrossKind::negbin;
      params.set("b", c.real("b"));
      params.set("lambda", c.real("lambda"));
    } else if (kind == "negbin-gamma") {
      ck = CrossKind::negbin_gamma;
      params.set("lambda", c.real("lambda"));
    } else {
      invalid("invalid_value", "kind must be poisson, negbin or negbin-gamma", "kind");
    }
    const double t = c.real("t");
    return seq_geometric_cross(ck, params, t, N);
  }
  if (family == "eagleson") {
    const NefFamily nf = nef_family_from_name(underscored(c.text("nef")));
    Params shape;
    if (nf == NefFamily::binomial) shape.set("n", c.integer("n"));
    if (nf == NefFamily::negative_binomial) shape.set("r", c.real("r"));
    if (nf == NefFamily::gamma || nf == NefFamily::hyperbolic) shape.set("q", c.real("q"));
    const double lambda = c.real("lambda"), eta = c.real("eta"), xi = c.real("xi");
    return seq_eagleson(NefSpec::from_params(nf, shape), lambda, eta, xi, N);
  }
  if (family == "sigma-z") {
    const double a = c.real("a"), z = c.real("z");
    return extremal_sigma_z(a, z, N).sequence;
  }
  invalid("unsupported_family",
          "family must be one of buja, beta-binomial, kibble, hyperbolic-beta, hyperbolic, geometric-cross, "
          "eagleson, sigma-z",
          "family");
}

ConjugateModel build_model(Config& c) {
  const std::string name = c.text("model");
  ModelKind kind;
  try {
    kind = model_kind_from_name(underscored(name));
  } catch (const Error&) {
    invalid("unsupported_model", "model must be beta-binomial, gamma-poisson, gauss-gauss or kibble-gamma",
            "model");
  }
  switch (kind) {
    case ModelKind::beta_binomial: {
      const int n = c.integer("n");
      const double a = c.real("a"), b = c.real("b");
      return beta_binomial_gibbs(n, a, b);
    }
    case ModelKind::gamma_poisson: {
      const double x0 = c.real("x0"), lambda = c.real("lambda");
      return gamma_poisson_gibbs(x0, lambda);
    }
    case ModelKind::gauss_gauss: {
      const double x0 = c.real("x0", 0.0), lambda = c.real("lambda");
      return gauss_gauss_gibbs(x0, lambda);
    }
    case ModelKind::kibble_gamma: {
      const double q = c.real("q"), r = c.real("r");
      return kibble_gamma_gibbs(q, r);
    }
  }
  invalid("unsupported_model", "unknown model", "model");
}

Measure build_measure(Config& c) {
  const std::string name = c.text("measure");
  Family family;
  try {
    family = family_from_name(underscored(name));
  } catch (const Error&) {
    invalid("unsupported_family", "unknown measure family " + name, "measure");
  }
  Params p;
  switch (family) {
    case Family::gaussian:
      p = {{"mean", c.real("mean", 0.0)}, {"variance", c.real("variance", 1.0)}};
      break;
    case Family::poisson:
      p = {{"mean", c.real("mean")}};
      break;
    case Family::binomial:
      p = {{"n", c.integer("n")}};
      p.set("p", c.real("p", 0.5));
      break;
    case Family::negative_binomial:
      p = {{"a", c.real("a")}};
      p.set("shape", c.real("shape"));
      break;
    case Family::gamma:
      p = {{"shape", c.real("shape")}};
      p.set("scale", c.real("scale", 1.0));
      break;
    case Family::hyperbolic:
    case Family::cartier_dunau:
      p = {{"q", c.real("q")}};
      break;
    case Family::beta:
    case Family::jacobi: {
      const double a = c.real("a");
      p = {{"a", a}, {"b", c.real("b", a)}};
      break;
    }
    case Family::beta_binomial:
      p = {{"n", c.integer("n")}};
      p.set("a", c.real("a"));
      p.set("b", c.real("b"));
      break;
    default:
      invalid("unsupported_family", "measure must be parametric", "measure");
  }
  return Measure::from_params(family, p);
}

Json cmd_build(Config& c) {
  const int N = c.integer("N", 10);
  const auto seq = build_sequence(c, N);
  return Json{{"distribution", make_bivariate(seq, std::min(N, seq.N()))}};
}

Json cmd_verify(Config& c) {
  const int N = c.integer("N", 20);
  const auto seq = build_sequence(c, N);
  const Interval sx = seq.margin_x.support(), sy = seq.margin_y.support();
  const std::string inferred = sx.whole_line() && sy.whole_line() ? "C" : "D";
  const std::string which = c.text("case", inferred);
  if (which != "C" && which != "D") invalid("invalid_value", "case must be C or D", "case");
  const auto report = verify_moment_representation(seq, which == "C" ? SupportCase::C : SupportCase::D, N);
  return report;
}

Json cmd_chain(Config& c) {
  const auto model = build_model(c);
  double fallback_start = 0.0;
  if (model.kind == ModelKind::gauss_gauss) fallback_start = model.params.at("x0");
  if (model.kind == ModelKind::kibble_gamma) fallback_start = model.params.at("q");
  const double start = c.real("start", fallback_start);
  const int steps = c.integer("steps", 100000);
  const std::uint64_t seed = c.u64("seed", 0);
  const int degree = c.integer("degree", 1);
  const int max_lag = c.integer("max_lag", 10);
  const std::string trace_path = c.text("trace", "trace.csv");
  if (steps < 0) invalid("invalid_value", "steps must be nonnegative", "steps");

  ChainTrace trace;
  try {
    trace = run_x_chain(model, start, steps, seed);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw CliError{3, "sampler_failure", e.what(), {}};
  }
  for (double x : trace.states) {
    if (!std::isfinite(x)) throw CliError{3, "sampler_failure", "the chain produced a non-finite state", {}};
  }
  std::ofstream csv(trace_path, std::ios::binary);
  if (!csv) invalid("io_error", "cannot write " + trace_path, "trace");
  write_trace_csv(csv, trace);

  Json out{{"model", model.name()},
           {"generator", trace.generator},
           {"steps", trace.steps()},
           {"trace", trace_path},
           {"expected", model.rho(degree) * model.rho(degree)}};
  if (steps == 0) {
    out["diagnostics"] = nullptr;
    out["reason"] = "no transitions: the trace holds only the initial state";
    return out;
  }
  try {
    out["diagnostics"] = autocorrelation_vs_spectrum(trace, degree, max_lag);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::insufficient_length) throw;
    out["diagnostics"] = nullptr;
    out["reason"] = e.what();
  }
  return out;
}

Json cmd_spectrum(Config& c) {
  const auto model = build_model(c);
  const int degree = c.integer("degree", 1);
  const int max_degree = c.integer("max_degree", degree);
  const int resolution = c.integer("resolution", 64);
  Json checks = Json::array();
  double worst = 0.0;
  for (int n = degree; n <= max_degree; ++n) {
    const auto check = spectral_eigencheck(model, n, resolution);
    Json j = check;
    j["n"] = n;
    checks.push_back(std::move(j));
    worst = std::max(worst, check.residual);
  }
  return Json{{"model", model.name()}, {"max_residual", worst}, {"checks", checks}};
}

Json cmd_scan(Config& c) {
  const auto measure = build_measure(c);
  const bool finite = measure.atom_count() != SIZE_MAX;
  int default_N = kMaxDegree;
  if (finite) default_N = static_cast<int>(measure.atom_count()) - 1;
  if (measure.family() == Family::jacobi || measure.family() == Family::beta) default_N = 3200;
  const int N = c.integer("N", default_N);
  const int grid = c.integer("grid", 50);
  const std::string series = c.text("series", finite ? "raw" : "filtered");
  if (series != "raw" && series != "filtered") invalid("invalid_value", "series must be raw or filtered", "series");
  const double tolerance = c.real("tolerance", 1e-6);
  const auto x0 = c.optional_real("x0");
  const auto csv_path = c.optional_text("csv");

  const KernelSpec spec = make_kernel_spec(measure, N, x0);
  c.set("x0", spec.x0);
  if (spec.N != N) c.set("N", spec.N);
  ScanOptions options;
  options.mode = series == "raw" ? SeriesMode::raw : SeriesMode::filtered;
  options.tolerance = tolerance;
  options.keep_points = csv_path.has_value();
  const auto report = positivity_scan(spec, grid, options);
  if (csv_path) {
    std::ofstream csv(*csv_path, std::ios::binary);
    if (!csv) invalid("io_error", "cannot write " + *csv_path, "csv");
    write_scan_csv(csv, report);
  }
  Json out = report;
  out["measure"] = measure;
  return out;
}

Json cmd_quadrature(Config& c) {
  const auto measure = build_measure(c);
  const int nodes = c.integer("nodes", 10);
  const auto csv_path = c.optional_text("csv");
  if (nodes < 1) invalid("invalid_value", "nodes must be positive", "nodes");
  const auto rule = quadrature(recurrence(measure, nodes), nodes);
  if (csv_path) {
    std::ofstream csv(*csv_path, std::ios::binary);
    if (!csv) invalid("io_error", "cannot write " + *csv_path, "csv");
    write_quadrature_csv(csv, rule);
  }
  return Json{{"measure", measure}, {"rule", rule}};
}

void emit_error(const CliError& e) {
  Json j{{"error", e.code}, {"message", e.message}};
  if (!e.field.empty()) j["field"] = e.field;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lancaster probabilities, Gibbs chains and kernel positivity"};
  app.require_subcommand(1);
  std::string config_path, out_path;
  bool json_errors = true;  // errors are always JSON; the flag is accepted for scripts
  std::map<std::string, std::map<std::string, std::string>> raw;
  const auto keys = command_keys();
  for (const auto& [name, list] : keys) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON object of keys; overrides flags");
    sub->add_option("--out", out_path, "output JSON path (default: stdout)");
    sub->add_flag("--json-errors", json_errors, "emit errors as JSON (always on)");
    for (const auto& key : list) sub->add_option("--" + key, raw[name][key]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error({2, "usage", e.what(), {}});
    return 2;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    Json given = Json::object();
    for (const auto& key : keys.at(command)) {
      if (sub->count("--" + key)) given[key] = convert(key, raw[command][key]);
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) invalid("io_error", "cannot read " + config_path, "config");
      Json file;
      try {
        file = Json::parse(in);
      } catch (const Json::parse_error& e) {
        invalid("invalid_config", e.what(), "config");
      }
      if (!file.is_object()) invalid("invalid_config", "config must be a JSON object", "config");
      const auto& allowed = keys.at(command);
      for (const auto& [key, value] : file.items()) {
        if (key == "command") {
          if (value != command) invalid("invalid_config", "config was resolved for another command", key);
          continue;
        }
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
          invalid("unknown_key", "unknown key " + key + " for " + command, key);
        }
        if (value.is_null()) continue;  // optional keys echoed as null
        check_type(key, value);
        given[key] = value;
      }
    }

    Config config(std::move(given));
    Json payload;
    if (command == "build") payload = cmd_build(config);
    if (command == "verify") payload = cmd_verify(config);
    if (command == "chain") payload = cmd_chain(config);
    if (command == "spectrum") payload = cmd_spectrum(config);
    if (command == "scan") payload = cmd_scan(config);
    if (command == "quadrature-dump") payload = cmd_quadrature(config);
    if (command != "chain") config.u64("seed", 0);
    config.reject_unused();

    Json out{{"command", command}, {"config", config.resolved()}};
    for (auto& [key, value] : payload.items()) out[key] = value;
    const std::string text = out.dump(2) + "\n";
    if (out_path.empty()) {
      std::cout << text;
    } else {
      std::ofstream os(out_path, std::ios::binary);
      if (!os) invalid("io_error", "cannot write " + out_path, "out");
      os << text;
    }
    return 0;
  } catch (const CliError& e) {
    emit_error(e);
    return e.exit_code;
  } catch (const Error& e) {
    const bool budget = e.code() == ErrorCode::resource_budget;
    emit_error({budget ? 4 : 2, std::string(to_string(e.code())), e.what(), {}});
    return budget ? 4 : 2;
  } catch (const std::exception& e) {
    emit_error({2, "invalid_argument", e.what(), {}});
    return 2;
  }
}
