// renewal_arma: factorize, simulate, verify and tabulate superposed renewal
// count series from the command line.
//
// Exit codes: 0 ok, 1 io, 2 bad arguments, 3 invalid or lattice lifetime,
// 4 numerical failure, 5 verification gate failure.

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "renarma/arma.hpp"
#include "renarma/markov.hpp"
#include "renarma/renewal.hpp"
#include "renarma/serialization.hpp"
#include "renarma/verification.hpp"
#include "renarma/version.hpp"

namespace {

using renarma::Json;

enum ExitCode { kOk = 0, kIo = 1, kArgument = 2, kValidation = 3, kNumerical = 4, kGateFailure = 5 };

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// --config: a flat JSON object mirroring the flags, or a run manifest, whose
/// "parameters" object is used. Items are routed to the subcommand named on the
/// command line.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string command) : command_(std::move(command)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    Json doc;
    try {
      doc = Json::parse(in);
    } catch (const Json::exception& e) {
      throw CLI::ConversionError(std::string("config is not valid JSON: ") + e.what());
    }
    if (doc.is_object() && doc.contains("parameters")) doc = doc.at("parameters");
    if (!doc.is_object()) throw CLI::ConversionError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      if (value.is_null()) continue;
      CLI::ConfigItem item;
      item.parents = {command_};
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
    return items;
  }

 private:
  static std::string scalar(const Json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
      std::string joined;
      for (const auto& x : v) joined += (joined.empty() ? "" : ",") + scalar(x);
      return joined;
    }
    return v.dump();
  }

  std::string command_;
};

/// Correctly rounded decimal to double.
double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ArgumentError(what + ": not a number: '" + text + "'");
  return value;
}

std::vector<double> parse_doubles(const std::vector<std::string>& items, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : items) out.push_back(parse_double(item, what));
  return out;
}

std::string utc_timestamp() {
  std::time_t now = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) now = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw IoError("sha256 failed");
  std::ostringstream hex;
  for (unsigned int i = 0; i < length; ++i) hex << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return hex.str();
}

Json manifest(const std::string& command, const Json& parameters) {
  Json m{{"schema", renarma::kManifestSchema},
         {"command", command},
         {"parameters", parameters},
         {"version", renarma::kVersion},
         {"timestamp", utc_timestamp()},
         {"outputs", Json::array()}};
  if (parameters.contains("seed")) m["seed"] = parameters.at("seed");
  return m;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << bytes;
  out.close();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

unsigned thread_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("RENEWAL_ARMA_THREADS")) {
    unsigned cap = 0;
    const std::string text(env);
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), cap);
    if (ec != std::errc() || ptr != text.data() + text.size())
      throw ArgumentError("RENEWAL_ARMA_THREADS must be a nonnegative integer");
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

/// Lifetime flags shared by every subcommand.
struct SpecArgs {
  std::vector<std::string> head;
  std::string r;
  int M = 1;

  void add_to(CLI::App* app, bool required) {
    auto* h = app->add_option("--head", head, "head probabilities f_1,...,f_p")->delimiter(',');
    auto* t = app->add_option("--r", r, "tail ratio r in [0,1): P(L=k+1) = r P(L=k) for k > p");
    if (required) {
      h->required();
      t->required();
    }
    app->add_option("--M", M, "number of superposed chains")->check(CLI::PositiveNumber);
  }

  bool given() const { return !head.empty() || !r.empty(); }

  renarma::LifetimeSpec spec() const {
    if (head.empty() || r.empty()) throw ArgumentError("--head and --r are both required");
    return renarma::make_constant_hazard(parse_doubles(head, "--head"), parse_double(r, "--r"));
  }

  /// Parsed values echoed to full precision.
  Json echo() const {
    Json j{{"M", M}};
    if (!head.empty()) j["head"] = parse_doubles(head, "--head");
    if (!r.empty()) j["r"] = parse_double(r, "--r");
    return j;
  }
};

// ---------------------------------------------------------------- factorize

struct FactorizeArgs {
  SpecArgs spec;
  std::vector<std::string> pgf_num, pgf_den;
  int hmax = 10;
};

int run_factorize(const FactorizeArgs& a) {
  Json params = a.spec.echo();
  params["hmax"] = a.hmax;
  std::optional<renarma::LifetimeSpec> spec;
  renarma::RationalPGF F;
  if (!a.pgf_num.empty() || !a.pgf_den.empty()) {
    if (a.spec.given()) throw ArgumentError("give either --head/--r or --pgf-num/--pgf-den, not both");
    if (a.pgf_num.empty() || a.pgf_den.empty()) throw ArgumentError("--pgf-num and --pgf-den go together");
    const auto num = parse_doubles(a.pgf_num, "--pgf-num");
    const auto den = parse_doubles(a.pgf_den, "--pgf-den");
    params["pgf_num"] = num;
    params["pgf_den"] = den;
    F = renarma::make_rational_pgf(renarma::Poly<double>::from(num), renarma::Poly<double>::from(den));
  } else {
    spec = a.spec.spec();
    F = renarma::pgf(*spec);
  }

  const auto fit = renarma::factorize_detailed(F, a.spec.M);
  Json out = renarma::to_json(fit.model);
  out["schema"] = renarma::kFactorizeSchema;
  if (spec) out["spec"] = renarma::to_json(*spec);
  out["pgf"] = {{"P", std::vector<double>(F.P.coeffs().begin(), F.P.coeffs().end())},
                {"Q", std::vector<double>(F.Q.coeffs().begin(), F.Q.coeffs().end())}};
  out["ar_order"] = fit.model.ar_order();
  out["ma_order"] = fit.model.ma_order();
  out["k_constant_term"] = fit.k_constant_term;
  out["k_variance_route"] = fit.k_variance_route;
  out["sigma_L2"] = fit.sigma_L2;
  out["roots"] = renarma::to_json(renarma::check_causal_invertible(fit.model));
  out["acvf"] = renarma::arma_acvf(fit.model, a.hmax);
  out["manifest"] = manifest("factorize", params);
  std::cout << out.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  SpecArgs spec;
  std::int64_t steps = 0;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
};

int run_simulate(const SimulateArgs& a) {
  const renarma::SimConfig config{a.spec.spec(), a.spec.M, a.steps, a.seed};
  Json params = a.spec.echo();
  params["steps"] = a.steps;
  params["seed"] = a.seed;
  params["out"] = a.out;
  params["format"] = a.format;

  const renarma::CountSeries series = renarma::simulate_counts(config, thread_count());
  std::ostringstream buffer;
  if (a.format == "json")
    renarma::write_series_json(buffer, series);
  else
    renarma::write_series_csv(buffer, series);
  const std::string bytes = buffer.str();
  write_file(a.out, bytes);

  Json m = manifest("simulate", params);
  m["outputs"].push_back({{"path", a.out}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
  write_file(a.out + ".manifest.json", m.dump(2) + "\n");
  std::cout << m.dump(2) << '\n';
  return kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  SpecArgs spec;
  std::string level = "quick";
  std::string model;
  std::string series;
  std::int64_t steps = 1'000'000;
  std::uint64_t seed = 20261019;
  bool json = false;
  std::string report;
};

Json gates_json(const renarma::VerificationReport& report) {
  Json gates = Json::array();
  for (const auto& g : report.gates) {
    Json j{{"name", g.name},
           {"measured", std::isfinite(g.measured) ? Json(g.measured) : Json()},
           {"threshold", g.threshold},
           {"comparison", g.at_least ? ">=" : "<="},
           {"passed", g.passed}};
    if (!g.note.empty()) j["note"] = g.note;
    gates.push_back(std::move(j));
  }
  return gates;
}

void print_human(const std::string& title, const renarma::VerificationReport& report) {
  std::size_t width = 0;
  int passed = 0;
  for (const auto& g : report.gates) width = std::max(width, g.name.size());
  std::cout << title << '\n';
  for (const auto& g : report.gates) {
    passed += g.passed;
    std::cout << "  " << (g.passed ? "PASS" : "FAIL") << "  " << std::left << std::setw(int(width)) << g.name
              << "  measured " << std::setprecision(6) << g.measured << (g.at_least ? " >= " : " <= ") << g.threshold;
    if (!g.note.empty()) std::cout << "  (" << g.note << ")";
    std::cout << '\n';
  }
  std::cout << passed << "/" << report.gates.size() << " gates passed\n";
}

int run_verify(const VerifyArgs& a) {
  Json params = a.spec.echo();
  params["level"] = a.level;
  params["seed"] = a.seed;
  params["steps"] = a.steps;
  if (!a.model.empty()) params["model"] = a.model;
  if (!a.series.empty()) params["series"] = a.series;

  renarma::VerificationReport report;
  std::string title;
  Json subject;
  if (!a.series.empty()) {
    if (a.spec.given()) throw ArgumentError("--series carries its own spec; drop --head/--r");
    std::istringstream in(read_file(a.series));
    const renarma::CountSeries series = renarma::read_series(in);
    report = renarma::verify_series(series);
    renarma::VerifyOptions opt;
    opt.M = series.config.M;
    const auto analytic = renarma::run_verification(series.config.spec, opt);
    report.gates.insert(report.gates.end(), analytic.gates.begin(), analytic.gates.end());
    subject = renarma::to_json(series.config);
    title = "verify series " + a.series;
  } else {
    renarma::VerifyOptions opt;
    opt.M = a.spec.M;
    opt.level = a.level == "full" ? renarma::VerifyLevel::full : renarma::VerifyLevel::quick;
    opt.seed = a.seed;
    opt.steps = a.steps;
    opt.threads = thread_count();
    if (!a.model.empty()) {
      try {
        opt.model = renarma::model_from_json(Json::parse(read_file(a.model)));
      } catch (const Json::exception& e) {
        throw renarma::ValidationError(std::string("model file is not valid JSON: ") + e.what());
      }
    }
    const renarma::LifetimeSpec spec = a.spec.spec();
    report = renarma::run_verification(spec, opt);
    subject = renarma::to_json(spec);
    subject["M"] = a.spec.M;
    title = "verify " + subject.dump() + " level " + a.level;
  }

  Json doc{{"schema", renarma::kVerifySchema},
           {"subject", subject},
           {"level", a.series.empty() ? a.level : "series"},
           {"passed", report.passed()},
           {"gates", gates_json(report)},
           {"manifest", manifest("verify", params)}};
  if (!a.report.empty()) write_file(a.report, doc.dump(2) + "\n");
  if (a.json)
    std::cout << doc.dump(2) << '\n';
  else
    print_human(title, report);
  return report.passed() ? kOk : kGateFailure;
}

// ---------------------------------------------------------------- markov

struct MarkovArgs {
  SpecArgs spec;
  std::vector<std::string> mgf;
};

int run_markov(const MarkovArgs& a) {
  const renarma::LifetimeSpec spec = a.spec.spec();
  if (spec.lag() != 2) throw ArgumentError("unsupported order: markov tables need exactly two head probabilities");
  Json params = a.spec.echo();
  const auto table = renarma::joint_probs_p2(spec);
  Json points = Json::array();
  std::vector<std::vector<double>> parsed;
  for (const auto& text : a.mgf) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
    if (parts.size() != 3) throw ArgumentError("--mgf takes s1,s2,s3");
    const auto s = parse_doubles(parts, "--mgf");
    parsed.push_back(s);
    points.push_back({{"s", s}, {"value", renarma::mgf_trivariate(table, a.spec.M, s[0], s[1], s[2])}});
  }
  params["mgf"] = parsed;
  Json out{{"schema", renarma::kMarkovSchema},
           {"spec", renarma::to_json(spec)},
           {"M", a.spec.M},
           {"joint", renarma::to_json(table)},
           {"conditional", renarma::to_json(renarma::conditional_probs_p2(spec))},
           {"mgf", points},
           {"manifest", manifest("markov", params)}};
  std::cout << out.dump(2) << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact ARMA structure and simulation of superposed renewal count series", "renewal_arma"};
  app.set_version_flag("--version", std::string(renarma::kVersion));
  app.require_subcommand(1);

  FactorizeArgs fa;
  auto* factorize = app.add_subcommand("factorize", "ARMA(p,q) model, root moduli, both k routes and gamma(0..hmax) as JSON");
  fa.spec.add_to(factorize, false);
  factorize->add_option("--pgf-num", fa.pgf_num, "lifetime pgf numerator coefficients, constant first")->delimiter(',');
  factorize->add_option("--pgf-den", fa.pgf_den, "lifetime pgf denominator coefficients, constant first")->delimiter(',');
  factorize->add_option("--hmax", fa.hmax, "largest autocovariance lag")->check(CLI::NonNegativeNumber);

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "write a seeded count series and its manifest");
  sa.spec.add_to(simulate, true);
  simulate->add_option("--steps", sa.steps, "series length")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sa.seed, "64-bit seed");
  simulate->add_option("--out", sa.out, "output path; the manifest goes to <out>.manifest.json")->required();
  simulate->add_option("--format", sa.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

  VerifyArgs va;
  auto* verify = app.add_subcommand(
      "verify",
      "run the invariant gates for a spec; exit 5 if any fails.\n"
      "Sample autocovariances use divisor n (biased, positive semidefinite).");
  va.spec.add_to(verify, false);
  verify->add_option("--level", va.level, "quick (analytic) or full (adds Monte-Carlo)")
      ->check(CLI::IsMember({"quick", "full"}));
  verify->add_option("--model", va.model, "check this ARMA model JSON instead of the factorized one");
  verify->add_option("--series", va.series, "check a simulated series file against its embedded spec");
  verify->add_option("--steps", va.steps, "Monte-Carlo series length")->check(CLI::PositiveNumber);
  verify->add_option("--seed", va.seed, "Monte-Carlo seed");
  verify->add_flag("--json", va.json, "print the JSON report instead of the table");
  verify->add_option("--report", va.report, "also write the JSON report here");

  MarkovArgs ma;
  auto* markov = app.add_subcommand("markov", "joint and conditional three-time tables for a lag-2 spec, and MGF values");
  ma.spec.add_to(markov, true);
  markov->add_option("--mgf", ma.mgf, "s1,s2,s3 (repeatable)");

  // --config is read by the root app, so it may appear after the subcommand.
  std::string command;
  for (int i = 1; i < argc && command.empty(); ++i)
    for (const auto* sub : {factorize, simulate, verify, markov})
      if (sub->get_name() == argv[i]) command = argv[i];
  app.set_config("--config", "", "JSON file of flag values, or a manifest to re-run");
  app.config_formatter(std::make_shared<JsonConfig>(command));
  for (auto* sub : {factorize, simulate, verify, markov}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kArgument;
  }

  try {
    if (*factorize) return run_factorize(fa);
    if (*simulate) return run_simulate(sa);
    if (*verify) return run_verify(va);
    if (*markov) return run_markov(ma);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kArgument;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return kIo;
  } catch (const renarma::LatticeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const renarma::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const renarma::NumericalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIo;
  }
  return kArgument;
}
