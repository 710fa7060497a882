#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "renarma/arma.hpp"
#include "renarma/renewal.hpp"
#include "support.hpp"

using namespace renarma;
using namespace renarma::testing;

namespace {

std::complex<double> on_circle(int j, int n) { return std::polar(1.0, 2 * std::numbers::pi * j / n); }

}  // namespace

TEST_CASE("geometric lifetime gives white noise") {
  const auto model = factorize(pgf(geometric_half()), 1);
  CHECK(model.ar_order() == 0);
  CHECK(model.ma_order() == 0);
  CHECK(model.k == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(model.mu == doctest::Approx(2.0));
  CHECK(model.sigma2 == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("running example is ARMA(2,1)") {
  const auto fit = factorize_detailed(pgf(running_example()), 5);
  const auto& m = fit.model;
  REQUIRE(m.ar_order() == 2);
  REQUIRE(m.ma_order() == 1);
  CHECK(m.phi[0] == doctest::Approx(-0.2).epsilon(1e-12));
  CHECK(m.phi[1] == doctest::Approx(-0.02).epsilon(1e-12));
  CHECK(std::abs(m.theta[0] - 6.176887918124478519e-3) < 1e-12);
  CHECK(std::abs(m.k - 0.647575292448327502) < 1e-12);
  CHECK(std::abs(fit.k_constant_term - fit.k_variance_route) < 1e-12);
  CHECK(fit.sigma_L2 == doctest::Approx(4.0975).epsilon(1e-12));
  CHECK(m.sigma2 == doctest::Approx(0.647575292448327502 * 5 / 3.05).epsilon(1e-12));
}

TEST_CASE("closed form for lag 2") {
  const auto cf = closed_form_p2(0.2, 0.3, 0.6);
  CHECK(cf.phi1 == doctest::Approx(-0.2));
  CHECK(cf.phi2 == doctest::Approx(-0.02));
  CHECK(cf.pi0 == doctest::Approx(0.004));
  CHECK(cf.pi1 == doctest::Approx(0.6476));
  REQUIRE(cf.a1.has_value());
  CHECK(std::abs(*cf.a1 + 161.893823112081875) < 1e-9);
  REQUIRE(cf.theta.size() == 1);
  CHECK(std::abs(cf.theta[0] - 6.176887918124478519e-3) < 1e-14);
  CHECK(std::abs(cf.k - 0.647575292448327502) < 1e-13);
}

TEST_CASE("closed form agrees with the general pipeline over random lag-2 specs") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    const auto spec = random_spec(2, rng);
    const auto cf = closed_form_p2(spec.head()[0], spec.head()[1], spec.tail_rate());
    const auto m = factorize(pgf(spec), 1);
    REQUIRE(m.ar_order() == 2);
    CHECK(std::abs(m.phi[0] - cf.phi1) < 1e-12);
    CHECK(std::abs(m.phi[1] - cf.phi2) < 1e-12);
    CHECK(std::abs(m.k - cf.k) < 1e-10 * cf.k);
    if (m.ma_order() == 1 && cf.theta.size() == 1) CHECK(std::abs(m.theta[0] - cf.theta[0]) < 1e-9);
  }
}

TEST_CASE("pi0 = 0 drops the MA part") {
  const auto cf = closed_form_p2(0.4, 0.3, 0.5);
  CHECK(cf.pi0 == 0.0);
  CHECK(cf.theta.empty());
  CHECK_FALSE(cf.a1.has_value());
  const auto m = factorize(pgf(make_constant_hazard({0.4, 0.3}, 0.5)), 2);
  CHECK(m.ma_order() == 0);
  // f_3 = f_2 r also removes phi_2: the lifetime is constant hazard after lag 1.
  CHECK(cf.phi2 == doctest::Approx(0.0));
  CHECK(m.ar_order() == 1);
  CHECK(m.phi[0] == doctest::Approx(cf.phi1));
  CHECK(m.k == doctest::Approx(cf.k).epsilon(1e-12));
}

TEST_CASE("f_{p+1} = f_p r lowers both orders by one") {
  // head 0.2, 0.2, 0.2 with r = 2/3 gives f_4 = f_3 r.
  const auto m = factorize(pgf(make_constant_hazard({0.2, 0.2, 0.2}, 2.0 / 3.0)), 1);
  CHECK(m.ar_order() == 2);
  CHECK(m.ma_order() == 1);
  CHECK(check_causal_invertible(m).passed());
}

TEST_CASE("lag-4 example") {
  const auto spec = make_constant_hazard({0.1, 0.2, 0.1, 0.2}, 0.5);
  const auto F = pgf(spec);
  const auto m = factorize(F, 3);
  CHECK(m.ar_order() == 4);
  CHECK(m.ma_order() == 3);
  CHECK(check_causal_invertible(m).passed());
  for (int j = 1; j < 64; ++j) {
    const auto z = on_circle(j, 64);
    const auto a = gen_eval_arma(m, z);
    const auto b = gen_eval_renewal(F, 3, mean(spec), z);
    CHECK(std::abs(a - b) < 1e-10 * std::abs(b));
  }
}

TEST_CASE("psi weights and acvf of an AR(1)") {
  ArmaModel ar1;
  ar1.phi = Eigen::VectorXd::Constant(1, 0.5);
  ar1.theta.resize(0);
  ar1.sigma2 = 1.0;
  const auto psi = psi_weights(ar1, 6);
  for (int j = 0; j < 6; ++j) CHECK(psi[j] == doctest::Approx(std::pow(0.5, j)));
  const auto gamma = arma_acvf(ar1, 8);
  for (int h = 0; h <= 8; ++h) CHECK(std::abs(gamma[h] - 4.0 / 3.0 * std::pow(0.5, h)) < 1e-13);
}

TEST_CASE("MA(1) acvf is exact") {
  ArmaModel ma1;
  ma1.phi.resize(0);
  ma1.theta = Eigen::VectorXd::Constant(1, 0.4);
  ma1.sigma2 = 2.0;
  const auto gamma = arma_acvf(ma1, 3);
  CHECK(gamma[0] == doctest::Approx(2.0 * 1.16));
  CHECK(gamma[1] == doctest::Approx(0.8));
  CHECK(gamma[2] == 0.0);
}

TEST_CASE("non-causal and non-invertible models are reported") {
  ArmaModel bad;
  bad.phi = Eigen::VectorXd::Constant(1, 1.5);
  bad.theta = Eigen::VectorXd::Constant(1, 0.2);
  bad.sigma2 = 1.0;
  const auto report = check_causal_invertible(bad);
  CHECK_FALSE(report.causal);
  CHECK(report.invertible);
  CHECK_FALSE(report.passed());
  CHECK_THROWS_WITH_AS(arma_acvf(bad, 3), "numerically non-causal", NumericalError);

  ArmaModel noninv;
  noninv.phi = Eigen::VectorXd::Constant(1, 0.3);
  noninv.theta = Eigen::VectorXd::Constant(1, -2.0);
  CHECK_FALSE(check_causal_invertible(noninv).invertible);

  ArmaModel common;
  common.phi = Eigen::VectorXd::Constant(1, 0.5);
  common.theta = Eigen::VectorXd::Constant(1, -0.5);
  const auto r = check_causal_invertible(common);
  CHECK(r.min_common_distance < 1e-12);
  CHECK_FALSE(r.coprime);
}

TEST_CASE("factorize rejects M < 1") {
  CHECK_THROWS_AS(factorize(pgf(running_example()), 0), ValidationError);
}

TEST_CASE("battery: identities, causality and the degree law") {
  const auto specs = battery(40);
  int generic = 0;
  for (const auto& spec : specs) {
    const auto F = pgf(spec);
    const int M = 1 + static_cast<int>(spec.head().size());
    const auto fit = factorize_detailed(F, M);
    const auto& m = fit.model;
    const int p = spec.lag();

    CHECK(std::abs(fit.k_constant_term - fit.k_variance_route) <= kRouteTolerance * fit.k_variance_route);
    CHECK(m.ar_order() == p);
    CHECK(m.ma_order() <= p - 1);
    generic += m.ma_order() == p - 1;

    const auto report = check_causal_invertible(m);
    CHECK(report.passed());

    for (int j = 1; j < 64; ++j) {
      const auto z = on_circle(j, 64);
      const auto a = gen_eval_arma(m, z);
      const auto b = gen_eval_renewal(F, M, mean(spec), z);
      CHECK(std::abs(a - b) <= 1e-9 * std::abs(b));
    }

    const auto g_arma = arma_acvf(m, 20);
    const auto g_ren = acvf_renewal(spec, M, 20);
    for (int h = 0; h <= 20; ++h) CHECK(std::abs(g_arma[h] - g_ren[h]) <= 1e-10 * g_ren[0]);
  }
  CHECK(generic == static_cast<int>(specs.size()));
}
