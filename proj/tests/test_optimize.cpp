#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"

#include "aoicache/analytic.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/optimize.hpp"

using namespace aoicache;
using namespace aoicache::optimize;
using doctest::Approx;

namespace {

const ChannelRates kSym(1000.0, 1000.0);

double golden_min(double lo, double hi, const auto& f) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    for (int i = 0; i < 300; ++i) {
        const double c = b - g * (b - a);
        const double d = a + g * (b - a);
        if (f(c) < f(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    return 0.5 * (a + b);
}

struct GridBest {
    double ratio = std::numeric_limits<double>::infinity();
    double p1 = 0.0;
    double p2 = 0.0;
};

// Exhaustive search over p in {0.001, ..., 1}^2 for the lowest update ratio
// meeting the weighted AoI cap.
GridBest brute_force_p4(const ChannelRates& r, double l1, double l2, double cap) {
    GridBest best;
    const double total = l1 + l2;
    for (int i = 1; i <= 1000; ++i) {
        const double p1 = i * 1e-3;
        const double a1 = l1 * (p1 / r.r_ul() + 1.0 / r.r_dl() + (1.0 - p1) / (p1 * l1));
        for (int j = 1; j <= 1000; ++j) {
            const double p2 = j * 1e-3;
            const double a2 = l2 * (p2 / r.r_ul() + 1.0 / r.r_dl() + (1.0 - p2) / (p2 * l2));
            if ((a1 + a2) / total > cap) continue;
            const double ratio = (p1 * l1 + p2 * l2) / total;
            if (ratio < best.ratio) best = {ratio, p1, p2};
        }
    }
    return best;
}

}  // namespace

TEST_SUITE("optimize") {

TEST_CASE("p1 symmetric rates split evenly") {
    for (double lambda : {0.0, 100.0, 250.0, 499.0}) CHECK(p1_opt_beta(kSym, lambda) == Approx(0.5).epsilon(1e-12));
    CHECK(p1_opt_beta(ChannelRates(300.0, 1000.0), 0.0) == Approx(0.6461106321).epsilon(1e-9));
    CHECK_THROWS_AS(p1_opt_beta(kSym, 500.0), Overload);
}

TEST_CASE("p1 beats a dense grid") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> rate(50.0, 5000.0);
    std::uniform_real_distribution<double> frac(0.0, 0.95);
    for (int i = 0; i < 50; ++i) {
        const ChannelRates r(rate(gen), rate(gen));
        const double lambda = frac(gen) * analytic::conv_capacity(r);
        const double best = analytic::conv_latency(r, lambda, p1_opt_beta(r, lambda));
        for (int k = 1; k < 1000; ++k) {
            const double b = k / 1000.0;
            if (b * r.r_ul() <= lambda || (1.0 - b) * r.r_dl() <= lambda) continue;
            CHECK(best <= analytic::conv_latency(r, lambda, b) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("p2 bisection root") {
    const auto sol = p2_solve(kSym, 200.0, 10, {});
    CHECK(sol.residual < 1e-9);
    CHECK_FALSE(sol.boundary);
    // independent: golden-section on the objective
    const auto obj = [](double b) {
        return analytic::rsuc_latency(kSym, 200.0, b) + analytic::rsuc_aoi(kSym, 10, b);
    };
    CHECK(sol.beta == Approx(golden_min(1e-9, 0.8 - 1e-9, obj)).epsilon(1e-6));
}

TEST_CASE("p2 split grows with the AoI weight") {
    double prev = 0.0;
    for (double w : {0.1, 1.0, 10.0}) {
        P2Config cfg;
        cfg.weight_aoi = w;
        const auto sol = p2_solve(kSym, 200.0, 10, cfg);
        CHECK(sol.beta > prev);
        prev = sol.beta;
    }
    P2Config heavy;
    heavy.weight_aoi = 1e9;
    CHECK(p2_solve(kSym, 0.0, 10, heavy).beta == Approx(analytic::rsuc_tradeoff_threshold(kSym, 10)).epsilon(1e-4));

    P2Config none;
    none.weight_aoi = 0.0;
    const auto b0 = p2_solve(kSym, 200.0, 10, none);
    CHECK(b0.boundary);
    CHECK(b0.beta < 1e-9);
    CHECK_THROWS_AS(p2_solve(kSym, 1000.0, 10, {}), Overload);
}

TEST_CASE("rsuc aoi floor") {
    CHECK(theorem4_min_aoi(kSym, 1) == Approx(5.828427124746e-3).epsilon(1e-12));
    CHECK(theorem4_min_aoi(kSym, 1) < theorem4_min_aoi(kSym, 10));
    CHECK(theorem4_min_aoi(kSym, 10) < theorem4_min_aoi(kSym, 100));
    for (std::size_t s : {1u, 7u, 50u}) {
        CHECK(analytic::rsuc_aoi(kSym, s, theorem4_beta(kSym, s)) ==
              Approx(theorem4_min_aoi(kSym, s)).epsilon(1e-12));
    }
}

TEST_CASE("p3 smallest split meeting the cap") {
    SUBCASE("at the floor") {
        const double floor = theorem4_min_aoi(kSym, 1);
        const double expect = 1.0 - 1.0 / (1.0 + std::sqrt(4.0 * 1000.0 / (2.0 * 1000.0)));
        CHECK(std::abs(p3_min_beta(kSym, 0.0, 1, floor) - expect) < 1e-10);
    }
    SUBCASE("inverting a known aoi") {
        CHECK(p3_min_beta(kSym, 200.0, 1, 6.0e-3) == Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("loose caps need almost no uplink") {
        CHECK(p3_min_beta(kSym, 200.0, 1, 1e9) < 1e-6);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(p3_min_beta(kSym, 200.0, 1, 5.0e-3), Infeasible);
        // beta = 0.5 leaves 500/s of delivery, not enough for 600/s
        CHECK_THROWS_AS(p3_min_beta(kSym, 600.0, 1, 6.0e-3), Infeasible);
    }
}

TEST_CASE("p3 result meets the cap and nothing smaller does") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> rate(50.0, 5000.0);
    std::uniform_real_distribution<double> mult(1.0, 20.0);
    std::uniform_int_distribution<std::size_t> items(1, 100);
    for (int i = 0; i < 100; ++i) {
        const ChannelRates r(rate(gen), rate(gen));
        const std::size_t s = items(gen);
        const double cap = theorem4_min_aoi(r, s) * mult(gen);
        const double b = rsuc_min_beta_for_aoi(r, s, cap);
        CHECK(analytic::rsuc_aoi(r, s, b) <= cap * (1.0 + 1e-12));
        CHECK(analytic::rsuc_aoi(r, s, b * (1.0 - 1e-6)) > cap);
        CHECK(b <= theorem4_beta(r, s) * (1.0 + 1e-12));
    }
}

TEST_CASE("rsuc capacity under an aoi cap") {
    CHECK(rsuc_capacity_at_aoi(kSym, 1, theorem4_min_aoi(kSym, 1)) == Approx(414.2135623731).epsilon(1e-9));
    CHECK(rsuc_capacity_at_aoi(kSym, 1, 1e12) == Approx(1000.0).epsilon(1e-9));
    double prev = 0.0;
    for (double cap = 0.006; cap < 1.0; cap *= 1.3) {
        const double c = rsuc_capacity_at_aoi(kSym, 1, cap);
        CHECK(c >= prev);
        prev = c;
    }
    CHECK_THROWS_AS(rsuc_capacity_at_aoi(kSym, 1, 1e-3), Infeasible);
}

TEST_CASE("p4 worked example") {
    const auto sc = Scenario::from_rates(kSym, {150.0, 50.0});
    const auto sol = p4_solve(sc, 0.02);
    REQUIRE(sol.p.size() == 2);
    CHECK(sol.p[0] == Approx(0.2750429175).epsilon(1e-8));
    CHECK(sol.p[1] == Approx(0.4763883074).epsilon(1e-8));
    CHECK(std::abs(sol.p[0] - 0.27504) <= 1e-4);
    CHECK(std::abs(sol.p[1] - 0.47636) <= 1e-4);
    CHECK(sol.y == Approx(0.3002300923).epsilon(1e-8));
    CHECK(sol.update_ratio == Approx(0.3253792650).epsilon(1e-8));
    CHECK(sol.clamped.empty());
    CHECK(std::abs(sol.constraint_residual) <= 1e-9);
    CHECK(std::abs(sol.p[0] * std::sqrt(150.0) - sol.p[1] * std::sqrt(50.0)) <= 1e-9);

    const auto grid = brute_force_p4(kSym, 150.0, 50.0, 0.02);
    CHECK(grid.ratio >= sol.update_ratio - 1e-12);
}

TEST_CASE("p4 symmetry and errors") {
    const auto sc = Scenario::from_rates(kSym, {70.0, 70.0, 70.0});
    const auto sol = p4_solve(sc, 0.03);
    CHECK(sol.p[0] == Approx(sol.p[1]).epsilon(1e-14));
    CHECK(sol.p[1] == Approx(sol.p[2]).epsilon(1e-14));

    CHECK_THROWS_AS(p4_solve(sc, 0.002), Infeasible);  // p = 1 already costs 1/R_UL + 1/R_DL
    CHECK_THROWS_AS(p4_solve(Scenario::from_rates(kSym, {100.0, 0.0}), 0.03), InvalidParameter);
    // overall floor: every item at its own minimizer
    CHECK(p4_aoi_floor(sc) == Approx(analytic::rea_aoi_item(kSym, 70.0, 1.0)));
}

TEST_CASE("p4 clamps items that would exceed one") {
    // one very hot item and a cold one; a tight cap pushes the cold one to p = 1
    const auto sc = Scenario::from_rates(kSym, {390.0, 10.0});
    const double cap = 0.0035;
    const auto sol = p4_solve(sc, cap);
    REQUIRE(sol.clamped.size() == 1);
    CHECK(sol.clamped[0] == 1);
    CHECK(sol.p[1] == 1.0);
    CHECK(sol.p[0] < 1.0);
    CHECK(std::abs(sol.constraint_residual) <= 1e-9);
    const auto grid = brute_force_p4(kSym, 390.0, 10.0, cap);
    CHECK(grid.ratio >= sol.update_ratio - 1e-12);
}

TEST_CASE("p4 is never beaten by brute force on random two-item instances") {
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> rate(500.0, 2000.0);
    std::uniform_real_distribution<double> load(10.0, 200.0);
    std::uniform_real_distribution<double> slack(1.05, 3.0);
    for (int i = 0; i < 5; ++i) {
        const ChannelRates r(rate(gen), rate(gen));
        const double l1 = load(gen);
        const double l2 = load(gen);
        const auto sc = Scenario::from_rates(r, {l1, l2});
        const double cap = p4_aoi_floor(sc) * slack(gen) + 1e-4;
        const auto sol = p4_solve(sc, cap);
        CHECK(sol.constraint_residual <= 1e-9);
        const auto grid = brute_force_p4(r, l1, l2, cap);
        INFO("instance " << i << " solver P=" << sol.update_ratio << " grid P=" << grid.ratio);
        CHECK(grid.ratio >= sol.update_ratio - 1e-12);
        CHECK(grid.ratio <= sol.update_ratio + 5e-3);
        if (sol.clamped.empty()) {
            CHECK(std::abs(sol.p[0] * std::sqrt(l1) - sol.p[1] * std::sqrt(l2)) <= 1e-9);
        }
    }
}

TEST_CASE("p4 interior items share p * sqrt(lambda)") {
    const auto sc = Scenario::from_popularity(kSym, 10, 200.0, Popularity::zipf(0.56));
    const auto sol = p4_solve(sc, 0.1);
    REQUIRE(sol.clamped.empty());
    const double k = sol.p[0] * std::sqrt(sc.lambda(0));
    for (std::size_t s = 1; s < 10; ++s) {
        CHECK(std::abs(sol.p[s] * std::sqrt(sc.lambda(s)) - k) <= 1e-9);
        CHECK(sol.p[s] > sol.p[s - 1]);
    }
}

}  // TEST_SUITE
