#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aoicache/model.hpp"

namespace aoicache::desim {

inline constexpr std::uint64_t kDefaultSeed = 20210601;
inline constexpr std::uint64_t kDefaultDivergenceBound = 10'000'000;

enum class ServiceModel {
    exponential,
    deterministic,  // every transmission takes exactly its mean time
};

struct Warmup {
    enum class Kind { fraction, duration };
    Kind kind = Kind::fraction;
    /// Fraction of the stop value (requests or seconds), or seconds.
    double value = 0.1;
};

struct StopRule {
    enum class Kind { requests, duration };
    Kind kind = Kind::requests;
    /// Post-warmup request count, or total simulated seconds of arrivals.
    double value = 1e6;
};

/// Piecewise-constant aggregate arrival rate; segment i covers
/// [start[i], start[i+1]) and the last one extends forever.
struct RateProfile {
    std::vector<double> start;
    std::vector<double> rate;

    void validate() const;
    double rate_at(double t) const;
};

struct SimConfig {
    Scenario scenario;
    SchemeParams scheme;
    std::uint64_t seed = kDefaultSeed;
    Warmup warmup{};
    StopRule stop{};
    unsigned replications = 10;
    ServiceModel service = ServiceModel::exponential;
    /// Any station queue longer than this aborts the replication as overloaded.
    std::uint64_t divergence_bound = kDefaultDivergenceBound;
    /// Overrides scenario.total_lambda() over time; items keep the scenario's
    /// request split.
    std::optional<RateProfile> arrival_profile;
    /// Optional ascending bucket boundaries on arrival time; bucket k covers
    /// [edges[k], edges[k+1]) and the last one is open-ended.
    std::vector<double> bucket_edges;
};

/// Throws InvalidParameter for structurally invalid configs. Stability is
/// not checked; unstable configs are caught by the divergence bound.
void validate(const SimConfig& cfg);

struct DeliveryRecord {
    std::uint32_t item = 0;
    double arrival_time = 0.0;
    double delivery_start = 0.0;  // start of the downlink transmission
    double delivery_complete = 0.0;
    double content_generation_time = 0.0;
    // Not part of the CSV stream; kept for per-record invariant checks.
    double service_time = 0.0;       // sum of every transmission of this request
    double transmission_time = 0.0;  // downlink transmission only

    double latency() const noexcept { return delivery_complete - arrival_time; }
    double aoi() const noexcept { return delivery_complete - content_generation_time; }
};

using RecordSink = std::function<void(const DeliveryRecord&)>;

/// Time-average occupancy versus arrival rate times mean sojourn, for
/// checking Little's law on one station (or "system").
struct StationStats {
    std::string name;
    double mean_in_system = 0.0;
    double arrival_rate = 0.0;
    double mean_sojourn = 0.0;
};

struct BucketSums {
    double latency_sum = 0.0;
    double aoi_sum = 0.0;
    std::uint64_t count = 0;
};

struct ReplicationStats {
    double mean_latency = 0.0;
    double mean_aoi = 0.0;
    std::uint64_t delivered = 0;
    bool overloaded = false;
    std::string diagnostic;
    double end_time = 0.0;
    std::uint64_t max_queue_length = 0;
    std::vector<StationStats> stations;

    // RSUC: intervals between successive installs of the same item.
    std::uint64_t update_intervals = 0;
    double update_interval_mean = 0.0;
    double update_interval_var = 0.0;

    // ReA, per item: number of served requests between successive updates.
    std::vector<std::uint64_t> inter_update_samples;
    std::vector<double> inter_update_mean;

    std::vector<BucketSums> buckets;
};

struct SimResult {
    PerfPoint perf;
    bool overloaded = false;
    std::string diagnostic;
    std::vector<ReplicationStats> replications;
    /// Per arrival-time bucket; empty when no bucket edges were configured.
    std::vector<PerfPoint> buckets;
};

/// One replication. Deterministic in (cfg, replication).
ReplicationStats run_replication(const SimConfig& cfg, unsigned replication, const RecordSink& sink = {});

/// All replications in parallel (OpenMP), aggregated in replication order.
/// The record sink, when given, receives the post-warmup deliveries of
/// replication 0.
SimResult simulate(const SimConfig& cfg, const RecordSink& sink = {});

/// Serial reference for simulate(); produces identical results.
SimResult simulate_serial(const SimConfig& cfg, const RecordSink& sink = {});

/// Mean across replication means with a Student-t 95% half-width.
SimResult aggregate(std::vector<ReplicationStats> reps, std::size_t bucket_count);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double student_t95(std::size_t dof);

/// CSV record stream with header; full double precision.
class RecordCsvWriter {
public:
    explicit RecordCsvWriter(std::ostream& out);
    void operator()(const DeliveryRecord& rec);

private:
    std::ostream* out_;
};

}  // namespace aoicache::desim
