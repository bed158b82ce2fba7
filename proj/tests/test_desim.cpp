#include <cmath>
#include <sstream>

#include "doctest.h"

#include "aoicache/analytic.hpp"
#include "aoicache/desim/event_queue.hpp"
#include "aoicache/desim/rng.hpp"
#include "aoicache/desim/simulator.hpp"
#include "aoicache/errors.hpp"

using namespace aoicache;
using namespace aoicache::desim;
using doctest::Approx;

namespace {

const ChannelRates kSym(1000.0, 1000.0);

SimConfig small_config(SchemeParams scheme, double lambda, std::size_t items = 1, double requests = 20000,
                       unsigned reps = 2) {
    SimConfig cfg{Scenario::from_popularity(kSym, items, lambda, Popularity::zipf(0.56)), std::move(scheme)};
    cfg.stop.value = requests;
    cfg.replications = reps;
    return cfg;
}

std::string record_stream(const SimConfig& cfg) {
    std::ostringstream os;
    RecordCsvWriter w(os);
    simulate(cfg, [&w](const DeliveryRecord& r) { w(r); });
    return os.str();
}

}  // namespace

TEST_SUITE("desim") {

TEST_CASE("exponential inverse transform") {
    CHECK(exponential_from_uniform(1.0, 3.0) == 0.0);
    CHECK(exponential_from_uniform(std::exp(-1.0), 2.0) == Approx(2.0).epsilon(1e-15));
    RandomStream rng(1);
    double sum = 0.0;
    constexpr int n = 1000000;
    for (int i = 0; i < n; ++i) sum += draw_exponential(rng, 0.25);
    CHECK(std::abs(sum / n / 0.25 - 1.0) < 0.005);
}

TEST_CASE("uniform draws stay in range") {
    RandomStream rng(2);
    for (int i = 0; i < 100000; ++i) {
        const double a = rng.uniform();
        const double b = rng.uniform_open_closed();
        CHECK(a >= 0.0);
        CHECK(a < 1.0);
        CHECK(b > 0.0);
        CHECK(b <= 1.0);
    }
}

TEST_CASE("stream seeds are distinct per replication and purpose") {
    CHECK(derive_stream_seed(7, 0, Stream::arrivals) != derive_stream_seed(7, 1, Stream::arrivals));
    CHECK(derive_stream_seed(7, 0, Stream::arrivals) != derive_stream_seed(7, 0, Stream::uplink));
    CHECK(derive_stream_seed(7, 0, Stream::arrivals) != derive_stream_seed(8, 0, Stream::arrivals));
    CHECK(derive_stream_seed(7, 3, Stream::items) == derive_stream_seed(7, 3, Stream::items));
}

TEST_CASE("item assignment frequencies") {
    RandomStream rng(3);
    const std::vector<double> one{1.0};
    for (int i = 0; i < 100; ++i) CHECK(assign_item(rng, one) == 0);

    constexpr int n = 1000000;
    SUBCASE("two equal items") {
        const ItemSampler s(std::vector<double>{0.5, 0.5});
        int first = 0;
        for (int i = 0; i < n; ++i) first += s.draw(rng) == 0;
        CHECK(std::abs(first / double(n) / 0.5 - 1.0) < 0.005);
    }
    SUBCASE("zipf rank frequencies") {
        const auto w = popularity_weights(Popularity::zipf(0.56), 10);
        const ItemSampler s(w);
        std::vector<int> hits(10);
        for (int i = 0; i < n; ++i) ++hits[s.draw(rng)];
        for (std::size_t k = 0; k < 10; ++k) CHECK(std::abs(hits[k] / double(n) / w[k] - 1.0) < 0.01);
    }
    CHECK(ItemSampler(std::vector<double>{0.0, 1.0}).select(0.0) == 1);
    CHECK_THROWS_AS(ItemSampler(std::vector<double>{}), InvalidParameter);
}

TEST_CASE("event queue orders by time then insertion") {
    EventQueue q;
    q.push(2.0, EventKind::uplink_done);
    q.push(1.0, EventKind::arrival);
    q.push(2.0, EventKind::downlink_done);
    q.push(1.0, EventKind::fetch_done);
    q.push(0.5, EventKind::update_done);
    std::vector<EventKind> got;
    double last = -1.0;
    while (!q.empty()) {
        const Event e = q.pop();
        CHECK(e.time >= last);
        last = e.time;
        got.push_back(e.kind);
    }
    CHECK(got == std::vector<EventKind>{EventKind::update_done, EventKind::arrival, EventKind::fetch_done,
                                        EventKind::uplink_done, EventKind::downlink_done});
}

TEST_CASE("config validation") {
    auto cfg = small_config(Conventional{0.5}, 200.0);
    CHECK_NOTHROW(validate(cfg));
    auto bad = cfg;
    bad.replications = 0;
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
    bad = cfg;
    bad.scheme = Conventional{1.0};
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
    bad = cfg;
    bad.stop = {StopRule::Kind::duration, 10.0};
    bad.warmup = {Warmup::Kind::duration, 10.0};
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
    bad = cfg;
    bad.scenario = cfg.scenario.with_total_lambda(0.0);
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
    bad = cfg;
    bad.scheme = Rea{{0.5, 0.5}};
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
    bad = cfg;
    bad.arrival_profile = RateProfile{{0.0, 0.0}, {1.0, 1.0}};
    CHECK_THROWS_AS(validate(bad), InvalidParameter);
}

TEST_CASE("per-record invariants hold for every scheme") {
    for (const SchemeParams& scheme :
         {SchemeParams{Conventional{0.5}}, SchemeParams{Rsuc{0.4}}, SchemeParams{Rea{{0.3, 0.6, 1.0}}}}) {
        auto cfg = small_config(scheme, 250.0, 3, 20000, 1);
        std::size_t n = 0;
        bool ok = true;
        simulate(cfg, [&](const DeliveryRecord& r) {
            ++n;
            ok = ok && r.arrival_time <= r.delivery_start && r.delivery_start <= r.delivery_complete;
            ok = ok && r.content_generation_time <= r.delivery_complete;
            ok = ok && r.latency() >= 0.0 && r.aoi() >= 0.0;
            ok = ok && r.aoi() >= r.transmission_time - 1e-9;
            ok = ok && r.latency() >= r.service_time - 1e-9;
            ok = ok && r.item < 3;
        });
        INFO("scheme " << scheme_name(scheme));
        CHECK(ok);
        CHECK(n == 20000);
    }
}

TEST_CASE("identical configs give identical record streams") {
    for (const SchemeParams& scheme : {SchemeParams{Conventional{0.5}}, SchemeParams{Rsuc{0.4}},
                                       SchemeParams{Rea{{0.5, 0.5}}}}) {
        auto cfg = small_config(scheme, 200.0, 2, 5000, 3);
        cfg.seed = 7;
        const std::string a = record_stream(cfg);
        const std::string b = record_stream(cfg);
        CHECK(a == b);
        CHECK(a.rfind("item,arrival_time,delivery_start,delivery_complete,content_generation_time,latency,aoi\n", 0) ==
              0);
        cfg.seed = 8;
        CHECK(record_stream(cfg) != a);
    }
}

TEST_CASE("parallel replications match the serial reference") {
    auto cfg = small_config(Rsuc{0.3}, 300.0, 4, 10000, 5);
    const auto par = simulate(cfg);
    const auto ser = simulate_serial(cfg);
    CHECK(par.perf.mean_latency == ser.perf.mean_latency);
    CHECK(par.perf.mean_aoi == ser.perf.mean_aoi);
    CHECK(par.perf.latency_ci95 == ser.perf.latency_ci95);
    CHECK(par.perf.n_delivered == ser.perf.n_delivered);
    REQUIRE(par.replications.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(par.replications[i].mean_aoi == ser.replications[i].mean_aoi);
}

TEST_CASE("warmup and stop rules") {
    auto cfg = small_config(Conventional{0.5}, 200.0, 1, 3000, 1);
    cfg.warmup = {Warmup::Kind::fraction, 0.5};
    const auto r = run_replication(cfg, 0);
    CHECK(r.delivered == 3000);

    cfg.stop = {StopRule::Kind::duration, 50.0};
    cfg.warmup = {Warmup::Kind::duration, 10.0};
    const auto d = run_replication(cfg, 0);
    // about 200/s over 40 measured seconds
    CHECK(d.delivered > 7000);
    CHECK(d.delivered < 9000);
}

TEST_CASE("student t quantile") {
    CHECK(student_t95(1) == Approx(12.7062047).epsilon(1e-7));
    CHECK(student_t95(9) == Approx(2.2621572).epsilon(1e-7));
    CHECK_THROWS_AS(student_t95(0), InvalidParameter);
}

TEST_CASE("simulated means are close to the closed forms") {
    SUBCASE("conventional") {
        auto cfg = small_config(Conventional{0.5}, 200.0, 1, 200000, 4);
        const auto res = simulate(cfg);
        CHECK(res.perf.mean_latency == Approx(analytic::conv_latency(kSym, 200.0, 0.5)).epsilon(0.03));
        CHECK(res.perf.mean_aoi == Approx(analytic::conv_aoi_at(kSym, 200.0, 0.5)).epsilon(0.03));
    }
    SUBCASE("rsuc") {
        auto cfg = small_config(Rsuc{0.5}, 200.0, 1, 200000, 4);
        const auto res = simulate(cfg);
        CHECK(res.perf.mean_latency == Approx(analytic::rsuc_latency(kSym, 200.0, 0.5)).epsilon(0.03));
        CHECK(res.perf.mean_aoi == Approx(6.0e-3).epsilon(0.03));
    }
    SUBCASE("rea") {
        auto cfg = small_config(Rea{{1.0}}, 200.0, 1, 200000, 4);
        const auto res = simulate(cfg);
        CHECK(res.perf.mean_latency == Approx(3.0e-3).epsilon(0.03));
        CHECK(res.perf.mean_aoi == Approx(2.0e-3).epsilon(0.03));
    }
}

TEST_CASE("tandem latency is the sum of the per-station sojourns") {
    auto cfg = small_config(Conventional{0.4}, 250.0, 1, 200000, 4);
    const auto res = simulate(cfg);
    double sum = 0.0;
    for (const auto& rep : res.replications) {
        REQUIRE(rep.stations.size() == 3);
        sum += rep.stations[0].mean_sojourn + rep.stations[1].mean_sojourn;
    }
    CHECK(sum / res.replications.size() == Approx(res.perf.mean_latency).epsilon(1e-9));
    const double mm1 = 1.0 / (0.4 * 1000.0 - 250.0) + 1.0 / (0.6 * 1000.0 - 250.0);
    CHECK(std::abs(res.perf.mean_latency - mm1) <= res.perf.latency_ci95 + 0.03 * mm1);
}

TEST_CASE("little's law per station") {
    for (const SchemeParams& scheme :
         {SchemeParams{Conventional{0.5}}, SchemeParams{Rsuc{0.3}}, SchemeParams{Rea{{0.5}}}}) {
        auto cfg = small_config(scheme, 300.0, 1, 200000, 1);
        const auto rep = run_replication(cfg, 0);
        for (const auto& st : rep.stations) {
            INFO(scheme_name(scheme) << " " << st.name);
            CHECK(st.mean_in_system == Approx(st.arrival_rate * st.mean_sojourn).epsilon(0.02));
        }
    }
}

TEST_CASE("rsuc update intervals are erlang") {
    const std::size_t s = 4;
    const double beta = 0.5;
    auto cfg = small_config(Rsuc{beta}, 200.0, s, 100000, 1);
    const auto rep = run_replication(cfg, 0);
    const double mean = s / (beta * 1000.0);
    CHECK(rep.update_intervals > 100000);
    CHECK(rep.update_interval_mean == Approx(mean).epsilon(0.01));
    CHECK(rep.update_interval_var == Approx(s / std::pow(beta * 1000.0, 2)).epsilon(0.03));
}

TEST_CASE("rea inter-update request counts are geometric") {
    auto cfg = small_config(Rea{{0.25, 0.5}}, 200.0, 2, 200000, 1);
    const auto rep = run_replication(cfg, 0);
    REQUIRE(rep.inter_update_mean.size() == 2);
    CHECK(rep.inter_update_mean[0] == Approx(4.0).epsilon(0.02));
    CHECK(rep.inter_update_mean[1] == Approx(2.0).epsilon(0.02));
}

TEST_CASE("divergence detector") {
    auto cfg = small_config(Conventional{0.5}, 600.0, 1, 200000, 2);
    cfg.divergence_bound = 1000;
    cfg.warmup.value = 0.0;
    const auto res = simulate(cfg);
    CHECK(res.overloaded);
    CHECK(res.diagnostic.find("overload") != std::string::npos);
    CHECK(res.replications[0].max_queue_length > 1000);
    CHECK(res.replications[0].max_queue_length <= 1001);
    // partial statistics survive the abort
    CHECK(res.perf.n_delivered > 0);

    cfg.scenario = cfg.scenario.with_total_lambda(300.0);
    CHECK_FALSE(simulate(cfg).overloaded);
}

TEST_CASE("deterministic service") {
    auto cfg = small_config(Rsuc{0.5}, 10.0, 1, 200, 1);
    cfg.service = ServiceModel::deterministic;
    simulate(cfg, [](const DeliveryRecord& r) {
        CHECK(r.transmission_time == Approx(1.0 / 500.0).epsilon(1e-12));
    });
    auto conv = small_config(Conventional{0.5}, 1e-3, 1, 200, 1);
    conv.service = ServiceModel::deterministic;
    // nearly empty system: every request sees exactly the two transmission times
    simulate(conv, [](const DeliveryRecord& r) { CHECK(r.latency() == Approx(4.0e-3).epsilon(1e-6)); });
}

TEST_CASE("piecewise arrival profile") {
    auto cfg = small_config(Rsuc{0.2}, 100.0, 1, 1, 1);
    cfg.arrival_profile = RateProfile{{0.0, 100.0, 200.0}, {100.0, 0.0, 400.0}};
    cfg.bucket_edges = {0.0, 100.0, 200.0};
    cfg.stop = {StopRule::Kind::duration, 300.0};
    cfg.warmup = {Warmup::Kind::duration, 0.0};
    const auto res = simulate(cfg);
    REQUIRE(res.buckets.size() == 3);
    CHECK(res.buckets[0].n_delivered == Approx(10000).epsilon(0.05));
    CHECK(res.buckets[1].n_delivered == 0);
    CHECK(res.buckets[2].n_delivered == Approx(40000).epsilon(0.05));
    CHECK(cfg.arrival_profile->rate_at(150.0) == 0.0);
    CHECK(cfg.arrival_profile->rate_at(1e9) == 400.0);
}

}  // TEST_SUITE
