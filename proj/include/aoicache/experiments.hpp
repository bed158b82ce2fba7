#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aoicache/desim/simulator.hpp"
#include "aoicache/model.hpp"
#include "aoicache/table.hpp"

namespace aoicache::experiments {

enum class Family { validation, aoi_latency_tradeoff, capacity_aoi, scheme_compare, trace };

Family parse_family(std::string_view name);
std::string_view family_name(Family family) noexcept;

/// Simulation knobs shared by every family that simulates.
struct SimOptions {
    std::uint64_t seed = desim::kDefaultSeed;
    desim::Warmup warmup{};
    desim::StopRule stop{};
    unsigned replications = 10;
    desim::ServiceModel service = desim::ServiceModel::exponential;
    std::uint64_t divergence_bound = desim::kDefaultDivergenceBound;
};

desim::SimConfig make_sim_config(const Scenario& scenario, const SchemeParams& scheme, const SimOptions& opts);

/// Piecewise-constant aggregate arrival rate read from a `time,lambda` CSV.
struct ArrivalTrace {
    std::vector<double> time;
    std::vector<double> lambda;

    void validate() const;
    desim::RateProfile profile() const;
    /// End of the arrival horizon when none is given: last start plus the
    /// mean segment length. Throws for a single-segment trace.
    double default_horizon() const;
    /// Time-averaged rate over [0, horizon).
    double mean_rate(double horizon) const;

    static ArrivalTrace parse_csv(std::istream& in);
    static ArrivalTrace load_csv(const std::filesystem::path& path);
};

struct SweepSpec {
    Family family = Family::validation;
    ChannelRates rates{1000.0, 1000.0};
    std::size_t items = 1;
    Popularity popularity = Popularity::uniform();

    /// Swept variable: Lambda for validation, AoI cap for the trade-off and
    /// capacity families. Empty selects the family default.
    std::vector<double> grid;
    /// Fixed aggregate rate of the trade-off and scheme-comparison families.
    double lambda_total = 200.0;

    std::vector<SchemeKind> schemes{SchemeKind::conventional, SchemeKind::rsuc, SchemeKind::rea};
    std::vector<double> conv_betas{0.5};
    std::vector<double> rsuc_betas{0.2, 0.5, 0.8};
    /// ReA update probability, broadcast to every item.
    std::vector<double> rea_p{0.5, 1.0};

    bool simulate = true;
    SimOptions sim{};
    std::size_t workers = 0;  // 0 = OpenMP default

    // Relative tolerances added to the simulated 95% CI before flagging.
    double latency_tol = 0.03;
    double aoi_tol = 0.03;
    double rea_aoi_tol = 0.05;

    // scheme_compare grids; empty means the single value above.
    std::vector<std::size_t> item_grid;
    std::vector<double> theta_grid;
    std::vector<ChannelRates> rate_grid;
    double per_item_cap = 0.1;

    // trace
    std::optional<ArrivalTrace> trace;
    std::optional<double> horizon;
    /// Conventional split for the trace family; unset means the
    /// latency-optimal split at the trace's mean rate.
    std::optional<double> trace_conv_beta;

    void validate() const;
};

/// 30 log-spaced caps from 1.05x to 100x the lower of the RSUC floor and
/// 1/R_UL + 1/R_DL (the ReA cost of always updating).
std::vector<double> default_cap_grid(const ChannelRates& rates, std::size_t items);

// ---- validation ----

struct ValidationRow {
    double lambda = 0.0;
    SchemeKind scheme = SchemeKind::conventional;
    double knob = 0.0;  // beta, or p for ReA
    /// False when the analytic model has no steady state at this load; the
    /// point is then not simulated.
    bool analytic_stable = true;
    PerfPoint analytic;
    bool simulated = false;
    PerfPoint sim;
    bool overloaded = false;
    std::string diagnostic;
    bool latency_flag = false;
    bool aoi_flag = false;
    /// Largest relative gap between L and lambda*W over stations and
    /// replications.
    double little_max_rel_err = 0.0;
};

std::vector<ValidationRow> run_validation(const SweepSpec& spec);
Table validation_table(const std::vector<ValidationRow>& rows);

// ---- trade-off and capacity ----

enum class RowStatus { ok, infeasible, overloaded };
std::string_view status_name(RowStatus status) noexcept;

struct TradeoffRow {
    double aoi_cap = 0.0;
    SchemeKind scheme = SchemeKind::rsuc;
    RowStatus status = RowStatus::ok;
    double knob = 0.0;  // beta for RSUC, update ratio P for ReA
    double latency = 0.0;
    double aoi = 0.0;  // achieved AoI
    std::vector<double> update_prob;  // ReA only
};

std::vector<TradeoffRow> run_aoi_latency_tradeoff(const SweepSpec& spec);
Table tradeoff_table(const std::vector<TradeoffRow>& rows);

struct CapacityRow {
    double aoi_cap = 0.0;
    SchemeKind scheme = SchemeKind::rsuc;
    RowStatus status = RowStatus::ok;
    double capacity = 0.0;
    double knob = 0.0;  // beta for RSUC, P at capacity for ReA
};

std::vector<CapacityRow> run_capacity_aoi(const SweepSpec& spec);
Table capacity_table(const std::vector<CapacityRow>& rows);

/// Largest Lambda (relative tolerance `rel_tol`) at which the optimal ReA
/// update vector for `aoi_cap` keeps the queue stable. 0 when the cap is
/// infeasible at every load.
double rea_capacity_at_aoi(const ChannelRates& rates, std::size_t items, const Popularity& pop, double aoi_cap,
                           double rel_tol = 1e-6);

// ---- multi-item comparison ----

struct CompareConfig {
    ChannelRates rates{1000.0, 1000.0};
    std::size_t items = 1;
    Popularity popularity = Popularity::uniform();
};

struct PerItemRow {
    CompareConfig config;
    std::size_t item = 0;
    double lambda = 0.0;
    double update_prob = 0.0;
    double aoi = 0.0;
};

struct SchemeCompareResult {
    std::vector<CompareConfig> configs;
    /// curves[k] belongs to configs[k].
    std::vector<std::vector<TradeoffRow>> curves;
    std::vector<PerItemRow> per_item;
    /// Configs whose per-item ReA problem was infeasible at per_item_cap.
    std::vector<std::string> notes;
};

SchemeCompareResult run_scheme_compare(const SweepSpec& spec);
Table scheme_compare_table(const SchemeCompareResult& result);
Table per_item_table(const SchemeCompareResult& result);

// ---- trace-driven runs ----

struct TraceRow {
    SchemeKind scheme = SchemeKind::conventional;
    double knob = 0.0;
    /// Segment index, or -1 for the whole horizon.
    std::int64_t bucket = 0;
    double start = 0.0;
    double end = 0.0;
    double lambda = 0.0;
    PerfPoint perf;
    bool overloaded = false;
    std::string diagnostic;
};

std::vector<TraceRow> run_trace(const ArrivalTrace& trace, const std::vector<SchemeParams>& schemes,
                                const Scenario& scenario_template, const SimOptions& opts, double horizon);
/// Trace family driven by a SweepSpec (schemes from its knob lists).
std::vector<TraceRow> run_trace(const SweepSpec& spec);
Table trace_table(const std::vector<TraceRow>& rows);

/// Dispatches on spec.family; scheme_compare returns the curve table.
Table run_sweep(const SweepSpec& spec);

}  // namespace aoicache::experiments
