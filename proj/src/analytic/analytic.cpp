#include "aoicache/analytic.hpp"

#include <cmath>
#include <sstream>

#include "aoicache/errors.hpp"

namespace aoicache::analytic {

namespace {

[[noreturn]] void overload(const char* queue, double arrival, double service) {
    std::ostringstream os;
    os.precision(10);
    os << queue << " queue unstable: arrival rate lambda_total=" << arrival << " >= service rate " << service;
    throw Overload(os.str());
}

void require_load(double lambda_total) {
    if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total)) {
        throw InvalidParameter("lambda_total must be finite and >= 0");
    }
}

void require_split(double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidParameter("beta must lie in [0, 1]");
}

void require_ratio(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter(std::string(name) + " must lie in [0, 1]");
}

void require_items(std::size_t item_count) {
    if (item_count == 0) throw InvalidParameter("items must be >= 1");
}

}  // namespace

double conv_latency(const ChannelRates& rates, double lambda_total, double beta) {
    require_load(lambda_total);
    require_split(beta);
    const double mu_ul = beta * rates.r_ul();
    const double mu_dl = (1.0 - beta) * rates.r_dl();
    if (!(mu_ul > lambda_total)) overload("uplink", lambda_total, mu_ul);
    if (!(mu_dl > lambda_total)) overload("downlink", lambda_total, mu_dl);
    return 1.0 / (mu_ul - lambda_total) + 1.0 / (mu_dl - lambda_total);
}

double conv_capacity(const ChannelRates& rates) { return 1.0 / (1.0 / rates.r_ul() + 1.0 / rates.r_dl()); }

double conv_min_latency(const ChannelRates& rates, double lambda_total) {
    require_load(lambda_total);
    const double cap = conv_capacity(rates);
    if (!(lambda_total < cap)) overload("conventional (tandem)", lambda_total, cap);
    const double root_sum = 1.0 / std::sqrt(rates.r_ul()) + 1.0 / std::sqrt(rates.r_dl());
    return root_sum * root_sum / (1.0 - lambda_total * (1.0 / rates.r_ul() + 1.0 / rates.r_dl()));
}

double conv_opt_beta(const ChannelRates& rates, double lambda_total) {
    require_load(lambda_total);
    const double cap = conv_capacity(rates);
    if (!(lambda_total < cap)) overload("conventional (tandem)", lambda_total, cap);
    const double u = rates.r_ul();
    const double d = rates.r_dl();
    const double g = std::sqrt(u * d);
    return (g + lambda_total * (1.0 - std::sqrt(u / d))) / (u + g);
}

double conv_aoi(const ChannelRates& rates, double lambda_total) {
    return conv_aoi_at(rates, lambda_total, conv_opt_beta(rates, lambda_total));
}

double conv_aoi_at(const ChannelRates& rates, double lambda_total, double beta) {
    require_load(lambda_total);
    require_split(beta);
    const double mu_ul = beta * rates.r_ul();
    const double mu_dl = (1.0 - beta) * rates.r_dl();
    if (!(mu_ul > lambda_total)) overload("uplink", lambda_total, mu_ul);
    if (!(mu_dl > lambda_total)) overload("downlink", lambda_total, mu_dl);
    return 1.0 / mu_ul + 1.0 / (mu_dl - lambda_total);
}

double rsuc_latency(const ChannelRates& rates, double lambda_total, double beta) {
    require_load(lambda_total);
    require_split(beta);
    const double mu_dl = (1.0 - beta) * rates.r_dl();
    if (!(mu_dl > lambda_total)) overload("downlink", lambda_total, mu_dl);
    return 1.0 / (mu_dl - lambda_total);
}

double rsuc_aoi(const ChannelRates& rates, std::size_t item_count, double beta) {
    require_items(item_count);
    require_split(beta);
    if (beta == 0.0) throw DegenerateSplit("beta = 0: the RSUC cache is never updated and AoI is unbounded");
    if (beta == 1.0) throw DegenerateSplit("beta = 1: no downlink bandwidth is left for delivery");
    const double s = static_cast<double>(item_count);
    return (s + 3.0) / (2.0 * beta * rates.r_ul()) + 1.0 / ((1.0 - beta) * rates.r_dl());
}

double rsuc_tradeoff_threshold(const ChannelRates& rates, std::size_t item_count) {
    require_items(item_count);
    const double s = static_cast<double>(item_count);
    return 1.0 / (std::sqrt(2.0 * rates.r_ul() / ((s + 3.0) * rates.r_dl())) + 1.0);
}

ReaServiceMoments rea_service_moments(const ChannelRates& rates, double update_ratio) {
    require_ratio(update_ratio, "update ratio P");
    const double u = rates.r_ul();
    const double d = rates.r_dl();
    ReaServiceMoments m;
    m.update_ratio = update_ratio;
    m.mean_x = update_ratio / u + 1.0 / d;
    m.mean_x2 = 2.0 * update_ratio / (u * u) + 2.0 / (d * d) + 2.0 * update_ratio / (u * d);
    return m;
}

ReaServiceMoments rea_service_moments(const ChannelRates& rates, const Scenario& scenario,
                                      std::span<const double> update_prob) {
    for (double p : update_prob) require_ratio(p, "p");
    return rea_service_moments(rates, aoicache::update_ratio(scenario, update_prob));
}

double rea_latency(const ChannelRates& rates, double lambda_total, double update_ratio) {
    require_load(lambda_total);
    require_ratio(update_ratio, "update ratio P");
    const double u = rates.r_ul();
    const double d = rates.r_dl();
    const double load = lambda_total * (update_ratio / u + 1.0 / d);
    if (!(load < 1.0)) overload("ReA (M/G/1)", lambda_total, rea_capacity(rates, update_ratio));
    return (1.0 / d + update_ratio * lambda_total / (u * u)) / (1.0 - load) + update_ratio / u;
}

double pk_sojourn(double lambda_total, const ReaServiceMoments& moments) {
    require_load(lambda_total);
    const double rho = lambda_total * moments.mean_x;
    if (!(rho < 1.0)) overload("M/G/1", lambda_total, 1.0 / moments.mean_x);
    return lambda_total * moments.mean_x2 / (2.0 * (1.0 - rho)) + moments.mean_x;
}

double rea_capacity(const ChannelRates& rates, double update_ratio) {
    require_ratio(update_ratio, "update ratio P");
    return 1.0 / (update_ratio / rates.r_ul() + 1.0 / rates.r_dl());
}

bool rea_stable(const ChannelRates& rates, double lambda_total, double update_ratio) {
    return lambda_total * (update_ratio / rates.r_ul() + 1.0 / rates.r_dl()) < 1.0;
}

double rea_aoi_item(const ChannelRates& rates, double lambda_s, double update_prob) {
    require_ratio(update_prob, "p");
    if (update_prob == 0.0) {
        throw UnboundedAoi("p = 0: the item is never refreshed (static cache) and its AoI is unbounded");
    }
    if (!(lambda_s > 0.0) || !std::isfinite(lambda_s)) {
        throw InvalidParameter("per-item request rate lambda_s must be positive");
    }
    return update_prob / rates.r_ul() + 1.0 / rates.r_dl() + (1.0 - update_prob) / (update_prob * lambda_s);
}

double rea_aoi_avg(const ChannelRates& rates, const Scenario& scenario, std::span<const double> update_prob) {
    if (update_prob.size() != scenario.item_count()) throw InvalidParameter("p length must equal items");
    const double total = scenario.total_lambda();
    if (!(total > 0.0)) throw InvalidParameter("lambda_total must be positive for the weighted AoI");
    double acc = 0.0;
    for (std::size_t s = 0; s < update_prob.size(); ++s) {
        const double l = scenario.lambda(s);
        if (l == 0.0) continue;  // zero weight
        acc += l * rea_aoi_item(rates, l, update_prob[s]);
    }
    return acc / total;
}

double rea_aoi_item_argmin(const ChannelRates& rates, double lambda_s) {
    if (!(lambda_s > 0.0)) throw InvalidParameter("per-item request rate lambda_s must be positive");
    return std::min(1.0, std::sqrt(rates.r_ul() / lambda_s));
}

}  // namespace aoicache::analytic
