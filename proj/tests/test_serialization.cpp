#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "renarma/serialization.hpp"
#include "support.hpp"

using namespace renarma;
using namespace renarma::testing;

TEST_CASE("spec round trip") {
  const auto spec = running_example();
  const Json j = to_json(spec);
  CHECK(j.at("r") == 0.6);
  const auto back = spec_from_json(Json::parse(j.dump()));
  CHECK(back.head() == spec.head());
  CHECK(back.tail_rate() == spec.tail_rate());
  CHECK_THROWS_AS(spec_from_json(Json{{"head", {0.2}}}), ValidationError);
  CHECK_THROWS_AS(spec_from_json(Json{{"head", "x"}, {"r", 0.5}}), ValidationError);
}

TEST_CASE("model round trip keeps full precision") {
  const auto m = factorize(pgf(running_example()), 5);
  const auto back = model_from_json(Json::parse(to_json(m).dump()));
  CHECK(back.phi == m.phi);
  CHECK(back.theta == m.theta);
  CHECK(back.k == m.k);
  CHECK(back.sigma2 == m.sigma2);
  Json without = to_json(m);
  without.erase("sigma2");
  CHECK(model_from_json(without).sigma2 == doctest::Approx(m.k * 5 / m.mu));
  CHECK_THROWS_AS(model_from_json(Json{{"phi", {0.1}}}), ValidationError);
}

TEST_CASE("tables use the symbol names") {
  const Json t = to_json(joint_probs_p2(running_example()));
  for (const char* key : {"q", "p1", "p2", "p3", "p12", "p13", "p23", "p123"}) CHECK(t.contains(key));
  const Json c = to_json(conditional_probs_p2(running_example()));
  CHECK(c.at("p1g00").get<double>() == doctest::Approx(0.4));
}

TEST_CASE("series round trip through CSV and JSON") {
  const SimConfig cfg{running_example(), 5, 500, 77};
  const auto series = simulate_counts(cfg);

  std::stringstream csv;
  write_series_csv(csv, series);
  const std::string text = csv.str();
  CHECK(text.rfind("# meta: {", 0) == 0);
  CHECK(text.find("\nt,y\n0,") != std::string::npos);
  CHECK(text.find('\r') == std::string::npos);
  const auto from_csv = read_series(csv);
  CHECK(from_csv.values == series.values);
  CHECK(from_csv.config.seed == 77);
  CHECK(from_csv.config.M == 5);
  CHECK(from_csv.config.spec.head() == cfg.spec.head());

  std::stringstream js;
  write_series_json(js, series);
  const Json doc = Json::parse(js.str());
  CHECK(doc.at("meta").at("schema") == kSeriesSchema);
  const auto from_json = read_series(js);
  CHECK(from_json.values == series.values);
  CHECK(from_json.config.steps == 500);
}

TEST_CASE("malformed series files") {
  std::stringstream a("t,y\n0,1\n");
  CHECK_THROWS_AS(read_series(a), ValidationError);
  std::stringstream b("{\"values\": [1]}");
  CHECK_THROWS_AS(read_series(b), ValidationError);
}
