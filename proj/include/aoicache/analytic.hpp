#pragma once

#include <cstddef>
#include <span>

#include "aoicache/model.hpp"

// Closed-form steady-state latency, AoI and capacity of the three schemes.
// All functions are pure; stability checks use strict inequalities with no
// margin, so values close to capacity are large but finite.
namespace aoicache::analytic {

// ---- Conventional (tandem M/M/1 uplink + downlink) ----

/// Mean sojourn through both queues at split `beta`. Throws Overload naming
/// the unstable queue.
double conv_latency(const ChannelRates& rates, double lambda_total, double beta);

/// Largest stabilizable aggregate rate: 1 / (1/R_UL + 1/R_DL).
double conv_capacity(const ChannelRates& rates);

/// Latency at the latency-optimal split.
double conv_min_latency(const ChannelRates& rates, double lambda_total);

/// Latency-optimal split beta* (closed form). Throws Overload at or above
/// capacity.
double conv_opt_beta(const ChannelRates& rates, double lambda_total);

/// Delivered AoI at the latency-optimal split. Uplink queueing does not
/// contribute because the fetch starts when the request reaches the server.
double conv_aoi(const ChannelRates& rates, double lambda_total);

/// Delivered AoI at an explicit split; used to compare against simulations
/// that run a fixed beta.
double conv_aoi_at(const ChannelRates& rates, double lambda_total, double beta);

// ---- RSU-centric (round-robin updater + M/M/1 delivery queue) ----

double rsuc_latency(const ChannelRates& rates, double lambda_total, double beta);

/// (S+3)/(2 beta R_UL) + 1/((1-beta) R_DL). Independent of load. Throws
/// DegenerateSplit unless 0 < beta < 1.
double rsuc_aoi(const ChannelRates& rates, std::size_t item_count, double beta);

/// Split above which AoI and latency both grow with beta; also the AoI
/// minimizer.
double rsuc_tradeoff_threshold(const ChannelRates& rates, std::size_t item_count);

// ---- Request-adaptive (M/G/1 with optional fetch phase) ----

struct ReaServiceMoments {
    double mean_x = 0.0;
    double mean_x2 = 0.0;
    double update_ratio = 0.0;
};

ReaServiceMoments rea_service_moments(const ChannelRates& rates, double update_ratio);
ReaServiceMoments rea_service_moments(const ChannelRates& rates, const Scenario& scenario,
                                      std::span<const double> update_prob);

/// Mean sojourn of the ReA queue for update ratio P (scalar entry).
double rea_latency(const ChannelRates& rates, double lambda_total, double update_ratio);

/// Pollaczek-Khinchine mean waiting time plus mean service, from moments.
/// Independent route to rea_latency used for cross-checks.
double pk_sojourn(double lambda_total, const ReaServiceMoments& moments);

double rea_capacity(const ChannelRates& rates, double update_ratio);

/// True when Lambda * E[X] < 1.
bool rea_stable(const ChannelRates& rates, double lambda_total, double update_ratio);

/// Per-item delivered AoI: p/R_UL + 1/R_DL + (1-p)/(p lambda_s). Throws
/// UnboundedAoi for p = 0.
double rea_aoi_item(const ChannelRates& rates, double lambda_s, double update_prob);

/// Request-rate weighted mean of rea_aoi_item over all items.
double rea_aoi_avg(const ChannelRates& rates, const Scenario& scenario, std::span<const double> update_prob);

/// Per-item AoI minimizer min(1, sqrt(R_UL / lambda_s)).
double rea_aoi_item_argmin(const ChannelRates& rates, double lambda_s);

}  // namespace aoicache::analytic
