#pragma once

#include <cstddef>
#include <vector>

#include "aoicache/model.hpp"

namespace aoicache::optimize {

inline constexpr double kBisectionTol = 1e-12;
inline constexpr int kBisectionMaxIter = 200;

/// Latency-optimal conventional split (closed form). Throws Overload at or
/// above the conventional capacity.
double p1_opt_beta(const ChannelRates& rates, double lambda_total);

struct P2Config {
    double weight_aoi = 1.0;  // W_A >= 0
    double tol = kBisectionTol;
    int max_iter = kBisectionMaxIter;
};

struct P2Solution {
    double beta = 0.0;
    /// |LHS - RHS| of the stationarity condition at `beta`.
    double residual = 0.0;
    int iterations = 0;
    /// Set when W_A = 0 and the optimum sits on the beta -> 0 boundary.
    bool boundary = false;
};

/// Split minimizing RSUC latency + W_A * AoI, by bisection on the
/// stationarity condition over (0, 1 - Lambda/R_DL).
P2Solution p2_solve(const ChannelRates& rates, double lambda_total, std::size_t item_count, const P2Config& cfg = {});

/// Left-hand side minus right-hand side of the P2 stationarity condition.
double p2_condition(const ChannelRates& rates, double lambda_total, std::size_t item_count, double weight_aoi,
                    double beta);

/// Lowest achievable RSUC AoI: (1/sqrt(R_DL) + sqrt((S+3)/(2 R_UL)))^2.
double theorem4_min_aoi(const ChannelRates& rates, std::size_t item_count);

/// Split attaining theorem4_min_aoi: 1 - 1/(1 + sqrt((S+3) R_DL / (2 R_UL))).
double theorem4_beta(const ChannelRates& rates, std::size_t item_count);

/// Smallest split whose RSUC AoI is within `aoi_cap`, ignoring load.
/// Throws Infeasible below the AoI floor.
double rsuc_min_beta_for_aoi(const ChannelRates& rates, std::size_t item_count, double aoi_cap);

/// Latency-minimal RSUC split under an AoI cap. Throws Infeasible when the
/// cap is below the floor or the resulting split cannot carry the load.
double p3_min_beta(const ChannelRates& rates, double lambda_total, std::size_t item_count, double aoi_cap);

/// Downlink capacity left once the updater gets the minimal split for `aoi_cap`.
double rsuc_capacity_at_aoi(const ChannelRates& rates, std::size_t item_count, double aoi_cap);

struct P4Solution {
    std::vector<double> p;
    double update_ratio = 0.0;
    /// Items (0-based) fixed at p = 1.
    std::vector<std::size_t> clamped;
    int iterations = 0;
    /// Y of the final active set (0 when every item is clamped).
    double y = 0.0;
    /// Lagrange multiplier of the AoI constraint for the final active set.
    double multiplier = 0.0;
    /// Weighted AoI minus the cap (<= 0 when feasible, ~0 when active).
    double constraint_residual = 0.0;
};

/// Lowest weighted ReA AoI reachable by any update vector: every item at
/// its own minimizer min(1, sqrt(R_UL / lambda_s)).
double p4_aoi_floor(const Scenario& scenario);

/// Minimal update ratio subject to the request-weighted AoI cap. Iterates the
/// interior KKT solution and clamps items whose probability reaches 1.
P4Solution p4_solve(const Scenario& scenario, double aoi_cap);

}  // namespace aoicache::optimize
