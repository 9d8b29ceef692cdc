#include "helpers.hpp"
#include "regdiv/json_io.hpp"

using namespace regdiv;

TEST_SUITE("json_io") {
  TEST_CASE("parameters round-trip and merge over a base") {
    const auto m = reference_params(0.9);
    CHECK(params_from_json(to_json(m), ModelParams{}) == m);
    ValidationOptions opts;
    const auto merged = params_from_json(Json::parse(R"({"mu2": 1.4, "allow_equal_thetas": true})"), m, &opts);
    CHECK(merged.mu2 == 1.4);
    CHECK(merged.rho == 0.5);
    CHECK(opts.allow_equal_thetas);
  }

  TEST_CASE("bad parameter documents") {
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"kappa": 1})"), ModelParams{}), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json(Json::parse(R"({"mu2": "high"})"), ModelParams{}), std::invalid_argument);
    CHECK_THROWS_AS(params_from_json(Json::parse("[1, 2]"), ModelParams{}), std::invalid_argument);
    Json bad;
    CHECK_THROWS(bad = Json::parse("{\"mu2\": "));
  }

  TEST_CASE("policies round-trip") {
    for (const Policy& p : {Policy{LiquidateBoth{}}, Policy{BarrierRegime2{0.78}},
                            Policy{LiquidationBarrier{0.245, 1.022, 0.845, Ordering::C_b2_lt_b1}}})
      CHECK(policy_from_json(to_json(p)) == p);
    CHECK_THROWS(policy_from_json(Json::parse(R"({"type": "barrier_regime1", "b1": 1})")));
  }

  TEST_CASE("a solve result is a valid policy and parameter document") {
    const auto sel = select_policy(testing::base(0.9));
    const Json j = Json::parse(dump(to_json(sel), 17));
    CHECK(policy_from_json(j) == sel.policy);
    CHECK(params_from_json(j, ModelParams{}) == sel.params.raw());
    CHECK(j.at("case") == "C");
    CHECK(j.at("report").at("passed") == true);
  }

  TEST_CASE("significant-digit rounding") {
    const Json j{{"a", 0.123456789}, {"b", {1.0 / 3.0, 2}}, {"c", "text"}};
    const Json r = round_numbers(j, 3);
    CHECK(r.at("a").get<double>() == 0.123);
    CHECK(r.at("b")[0].get<double>() == 0.333);
    CHECK(r.at("b")[1].get<int>() == 2);
    CHECK(r.at("c") == "text");
    CHECK(dump(j, 3).find("0.123") != std::string::npos);
  }
}
