#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"

#include "aoicache/config.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/model.hpp"

using namespace aoicache;

TEST_SUITE("model") {

TEST_CASE("channel rates reject non-positive values") {
    CHECK_THROWS_AS(ChannelRates(0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS(ChannelRates(1.0, -2.0), InvalidParameter);
    CHECK_THROWS_AS(ChannelRates(INFINITY, 1.0), InvalidParameter);
    CHECK_THROWS_AS(ChannelRates(NAN, 1.0), InvalidParameter);
    ChannelRates r(300.0, 1000.0);
    CHECK(r.r_ul() == 300.0);
    CHECK(r.r_dl() == 1000.0);
}

TEST_CASE("rates from radio parameters") {
    SUBCASE("unit sinr gives b/l") {
        const auto r = rates_from_radio({24e6, 24000.0, 1.0, 1.0});
        CHECK(r.r_ul() == doctest::Approx(1000.0).epsilon(1e-14));
        CHECK(r.r_dl() == doctest::Approx(1000.0).epsilon(1e-14));
    }
    SUBCASE("sinr 3 doubles the rate") {
        const auto r = rates_from_radio({500.0, 1.0, 3.0, 1.0});
        CHECK(r.r_ul() == doctest::Approx(1000.0).epsilon(1e-14));
        CHECK(r.r_dl() == doctest::Approx(500.0).epsilon(1e-14));
    }
    SUBCASE("half sinr") {
        // 1000 * log2(1.5), evaluated at 30 digits
        const auto r = rates_from_radio({1000.0, 1.0, 0.5, 1.0});
        CHECK(r.r_ul() == doctest::Approx(584.9625007211562).epsilon(1e-13));
    }
    CHECK_THROWS_AS(rates_from_radio({0.0, 1.0, 1.0, 1.0}), InvalidParameter);
    CHECK_THROWS_AS(rates_from_radio({1.0, 1.0, -1.0, 1.0}), InvalidParameter);
}

TEST_CASE("radio rates are monotone in each parameter") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int i = 0; i < 200; ++i) {
        RadioParams p{u(gen) * 1e6, u(gen) * 1e4, u(gen), u(gen)};
        const auto base = rates_from_radio(p);
        RadioParams q = p;
        q.sinr_ul *= 1.1;
        CHECK(rates_from_radio(q).r_ul() > base.r_ul());
        q = p;
        q.sinr_dl *= 1.1;
        CHECK(rates_from_radio(q).r_dl() > base.r_dl());
        q = p;
        q.bandwidth_hz *= 1.1;
        CHECK(rates_from_radio(q).r_ul() > base.r_ul());
        q = p;
        q.content_size_bits *= 1.1;
        CHECK(rates_from_radio(q).r_dl() < base.r_dl());
    }
}

TEST_CASE("popularity weights examples") {
    const auto u = popularity_weights(Popularity::uniform(), 4);
    REQUIRE(u.size() == 4);
    for (double w : u) CHECK(w == 0.25);

    const auto z0 = popularity_weights(Popularity::zipf(0.0), 3);
    for (double w : z0) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    const auto z = popularity_weights(Popularity::zipf(0.56), 2);
    CHECK(z[0] == doctest::Approx(0.5958402614).epsilon(1e-9));
    CHECK(z[1] == doctest::Approx(0.4041597386).epsilon(1e-9));

    const auto e = popularity_weights(Popularity::explicit_weights({3.0, 1.0}), 2);
    CHECK(e[0] == doctest::Approx(0.75));
    CHECK_THROWS_AS(popularity_weights(Popularity::explicit_weights({1.0, 1.0}), 3), InvalidParameter);
    CHECK_THROWS_AS(Popularity::explicit_weights({1.0, -1.0}), InvalidParameter);
    CHECK_THROWS_AS(Popularity::zipf(-0.1), InvalidParameter);
    CHECK_THROWS_AS(popularity_weights(Popularity::uniform(), 0), InvalidParameter);
}

TEST_CASE("popularity weights sum to one and zipf is non-increasing") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> th(0.0, 3.0);
    std::uniform_int_distribution<std::size_t> sz(1, 500);
    for (int i = 0; i < 300; ++i) {
        const std::size_t s = sz(gen);
        const double theta = th(gen);
        const auto w = popularity_weights(Popularity::zipf(theta), s);
        REQUIRE(w.size() == s);
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= 1e-12);
        for (std::size_t k = 0; k < s; ++k) {
            CHECK(w[k] >= 0.0);
            if (k > 0) CHECK(w[k] <= w[k - 1]);
        }
    }
}

TEST_CASE("scenario from popularity and from rates agree") {
    const ChannelRates r(1000.0, 1000.0);
    const auto a = Scenario::from_popularity(r, 2, 200.0, Popularity::explicit_weights({3.0, 1.0}));
    const auto b = Scenario::from_rates(r, {150.0, 50.0});
    CHECK(a.item_count() == 2);
    CHECK(a.total_lambda() == doctest::Approx(200.0));
    CHECK(a.lambda(0) == doctest::Approx(b.lambda(0)));
    CHECK(a.lambda(1) == doctest::Approx(b.lambda(1)));
    CHECK(b.request_prob()[0] == doctest::Approx(0.75));

    const auto c = b.with_total_lambda(400.0);
    CHECK(c.lambda(0) == doctest::Approx(300.0));

    const auto idle = Scenario::from_rates(r, {0.0, 0.0});
    CHECK(idle.total_lambda() == 0.0);
    CHECK(idle.request_prob()[1] == doctest::Approx(0.5));

    CHECK_THROWS_AS(Scenario::from_rates(r, {}), InvalidParameter);
    CHECK_THROWS_AS(Scenario::from_rates(r, {1.0, -1.0}), InvalidParameter);
    CHECK_THROWS_AS(Scenario::from_popularity(r, 2, -1.0, Popularity::uniform()), InvalidParameter);
}

TEST_CASE("scheme validation and update ratio") {
    CHECK_NOTHROW(validate_scheme(Conventional{0.0}, 1));
    CHECK_THROWS_AS(validate_scheme(Rsuc{1.5}, 1), InvalidParameter);
    CHECK_THROWS_AS(validate_scheme(Rea{{0.5}}, 2), InvalidParameter);
    CHECK_THROWS_AS(validate_scheme(Rea{{0.5, -0.1}}, 2), InvalidParameter);

    const auto sc = Scenario::from_rates(ChannelRates(1000.0, 1000.0), {150.0, 50.0});
    CHECK(update_ratio(sc, std::vector<double>{1.0, 0.0}) == doctest::Approx(0.75));
    // uniform p gives P = p under any popularity
    CHECK(update_ratio(sc, std::vector<double>{0.3, 0.3}) == doctest::Approx(0.3));
    CHECK(update_ratio(sc.with_total_lambda(0.0), std::vector<double>{1.0, 1.0}) == 0.0);

    CHECK(parse_scheme_kind("rsuc") == SchemeKind::rsuc);
    CHECK(parse_scheme_kind("conv") == SchemeKind::conventional);
    CHECK_THROWS_AS(parse_scheme_kind("tdma"), InvalidParameter);
    CHECK(scheme_name(SchemeParams{Rea{{1.0}}}) == "rea");
}

TEST_CASE("config parsing") {
    const std::string text = R"(
r_ul: 300
r_dl: 1000
items: 10
lambda_total: 200
popularity: zipf
theta: 0.56
scheme:
  type: rea
  p: 0.5
)";
    const auto ps = parse_config_text(text, scenario_keys());
    const auto sc = scenario_from_params(ps);
    CHECK(sc.item_count() == 10);
    CHECK(sc.rates().r_ul() == 300.0);
    CHECK(sc.lambda(0) == doctest::Approx(200.0 * 0.214244).epsilon(1e-5));
    const auto scheme = scheme_from_params(ps, sc.item_count());
    REQUIRE(std::holds_alternative<Rea>(scheme));
    CHECK(std::get<Rea>(scheme).update_prob.size() == 10);

    SUBCASE("unknown keys fail") {
        CHECK_THROWS_AS(parse_config_text("r_ul: 1\nbogus: 2\n", scenario_keys()), InvalidParameter);
        CHECK_THROWS_AS(parse_config_text("scheme: {type: rsuc, gamma: 1}\n", scenario_keys()), InvalidParameter);
    }
    SUBCASE("missing keys name the parameter") {
        ParamSet p;
        p.set("r_ul", "1000");
        try {
            scenario_from_params(p);
            FAIL("expected an error");
        } catch (const InvalidParameter& e) {
            CHECK(std::string(e.what()).find("r_dl") != std::string::npos);
        }
    }
    SUBCASE("both load forms are rejected") {
        auto p = ps;
        p.set_list("lambda_list", {"1", "2"});
        CHECK_THROWS_AS(scenario_from_params(p), InvalidParameter);
    }
    SUBCASE("round trip") {
        const auto back = parse_config_text(to_config_text(sc, scheme), scenario_keys());
        const auto sc2 = scenario_from_params(back);
        REQUIRE(sc2.item_count() == sc.item_count());
        for (std::size_t s = 0; s < sc.item_count(); ++s) CHECK(sc2.lambda(s) == sc.lambda(s));
        CHECK(std::get<Rea>(scheme_from_params(back, 10)).update_prob == std::get<Rea>(scheme).update_prob);
    }
    SUBCASE("bad numbers") {
        ParamSet p;
        p.set("r_ul", "fast");
        CHECK_THROWS_AS(p.get_double("r_ul"), InvalidParameter);
        p.set("items", "1e6");
        CHECK(p.get_int("items") == 1000000);
    }
}

}  // TEST_SUITE
