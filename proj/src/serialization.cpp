#include "renarma/serialization.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "renarma/version.hpp"

namespace renarma {
namespace {

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), Eigen::Index(v.size()));
}

SimConfig config_from_json(const Json& c) {
  return SimConfig{spec_from_json(c), c.at("M").get<int>(), c.at("steps").get<std::int64_t>(),
                   c.at("seed").get<std::uint64_t>()};
}

}  // namespace

Json to_json(const LifetimeSpec& spec) { return {{"head", spec.head()}, {"r", spec.tail_rate()}}; }

LifetimeSpec spec_from_json(const Json& j, LifetimeOptions options) {
  try {
    return make_constant_hazard(j.at("head").get<std::vector<double>>(), j.at("r").get<double>(), options);
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed lifetime spec: ") + e.what());
  }
}

Json to_json(const ArmaModel& model) {
  return {{"phi", to_std(model.phi)}, {"theta", to_std(model.theta)}, {"k", model.k},
          {"M", model.M},             {"mu", model.mu},                {"sigma2", model.sigma2}};
}

ArmaModel model_from_json(const Json& j) {
  try {
    ArmaModel m;
    m.phi = to_eigen(j.at("phi").get<std::vector<double>>());
    m.theta = to_eigen(j.at("theta").get<std::vector<double>>());
    m.k = j.at("k").get<double>();
    m.M = j.at("M").get<int>();
    m.mu = j.at("mu").get<double>();
    m.sigma2 = j.contains("sigma2") ? j.at("sigma2").get<double>() : m.k * m.M / m.mu;
    return m;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed model: ") + e.what());
  }
}

Json to_json(const TriJointTable& t) {
  return {{"q", t.q},     {"p1", t.p1},   {"p2", t.p2},   {"p3", t.p3},
          {"p12", t.p12}, {"p13", t.p13}, {"p23", t.p23}, {"p123", t.p123}};
}

Json to_json(const ConditionalTableP2& c) {
  return {{"p1g00", c.p1g00}, {"p1g01", c.p1g01}, {"p1g10", c.p1g10}, {"p1g11", c.p1g11},
          {"p0g00", c.p0g00}, {"p0g01", c.p0g01}, {"p0g10", c.p0g10}, {"p0g11", c.p0g11}};
}

Json to_json(const CausalityReport& report) {
  auto roots = [](const std::vector<RootInfo>& rs) {
    Json out = Json::array();
    for (const auto& r : rs) out.push_back({{"re", r.root.real()}, {"im", r.root.imag()}, {"modulus", r.modulus}});
    return out;
  };
  Json j{{"ar_roots", roots(report.ar_roots)}, {"ma_roots", roots(report.ma_roots)}, {"causal", report.causal},
         {"invertible", report.invertible},    {"coprime", report.coprime},          {"passed", report.passed()}};
  j["min_common_distance"] = std::isfinite(report.min_common_distance) ? Json(report.min_common_distance) : Json();
  return j;
}

Json to_json(const SimConfig& config) {
  Json j = to_json(config.spec);
  j["M"] = config.M;
  j["steps"] = config.steps;
  j["seed"] = config.seed;
  return j;
}

Json series_meta(const SimConfig& config) {
  return {{"schema", kSeriesSchema}, {"version", kVersion}, {"config", to_json(config)}};
}

void write_series_csv(std::ostream& out, const CountSeries& series) {
  out << "# meta: " << series_meta(series.config).dump() << '\n';
  out << "t,y\n";
  for (std::size_t t = 0; t < series.values.size(); ++t) out << t << ',' << series.values[t] << '\n';
}

void write_series_json(std::ostream& out, const CountSeries& series) {
  const Json doc{{"meta", series_meta(series.config)}, {"values", series.values}};
  out << doc.dump() << '\n';
}

CountSeries read_series(std::istream& in) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    if (!text.empty() && text.front() == '{') {
      const Json doc = Json::parse(text);
      return {doc.at("values").get<std::vector<int>>(), config_from_json(doc.at("meta").at("config"))};
    }
    std::istringstream lines(text);
    std::string line;
    std::getline(lines, line);
    const std::string prefix = "# meta: ";
    if (line.rfind(prefix, 0) != 0) throw ValidationError("series CSV lacks its metadata line");
    const SimConfig config = config_from_json(Json::parse(line.substr(prefix.size())).at("config"));
    std::getline(lines, line);
    if (line != "t,y") throw ValidationError("series CSV lacks the t,y header");
    std::vector<int> values;
    while (std::getline(lines, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ValidationError("malformed series row: " + line);
      values.push_back(std::stoi(line.substr(comma + 1)));
    }
    return {std::move(values), config};
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed series file: ") + e.what());
  }
}

}  // namespace renarma
