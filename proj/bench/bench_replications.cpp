// Wall time of the OpenMP replication loop against the serial reference.
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "aoicache/desim/simulator.hpp"
#include "aoicache/experiments.hpp"

using namespace aoicache;

namespace {

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
    const double requests = argc > 1 ? std::atof(argv[1]) : 2e5;
    experiments::SimOptions o;
    o.stop.value = requests;
    o.replications = 8;
    const auto sc = Scenario::from_popularity(ChannelRates(1000.0, 1000.0), 10, 200.0, Popularity::zipf(0.56));

    std::printf("threads=%d requests=%.0f replications=%u\n", omp_get_max_threads(), requests, o.replications);
    std::printf("%-14s %10s %10s %8s %s\n", "scheme", "serial_s", "omp_s", "speedup", "identical");
    for (const SchemeParams& scheme : {SchemeParams{Conventional{0.5}}, SchemeParams{Rsuc{0.2}},
                                       SchemeParams{Rea{std::vector<double>(10, 0.5)}}}) {
        const auto cfg = experiments::make_sim_config(sc, scheme, o);
        desim::SimResult a;
        desim::SimResult b;
        const double ts = seconds([&] { a = desim::simulate_serial(cfg); });
        const double tp = seconds([&] { b = desim::simulate(cfg); });
        const bool same = a.perf.mean_latency == b.perf.mean_latency && a.perf.mean_aoi == b.perf.mean_aoi;
        std::printf("%-14s %10.3f %10.3f %8.2f %s\n", std::string(scheme_name(scheme)).c_str(), ts, tp, ts / tp,
                    same ? "yes" : "no");
    }
    return 0;
}
