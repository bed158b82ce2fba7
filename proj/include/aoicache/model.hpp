#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aoicache {

/// Full-band uplink (cache update) and downlink (delivery) service rates,
/// in content items per second. Per-scheme rates such as beta * r_ul are
/// derived where needed and never stored.
class ChannelRates {
public:
    ChannelRates(double r_ul, double r_dl);

    double r_ul() const noexcept { return r_ul_; }
    double r_dl() const noexcept { return r_dl_; }

    friend bool operator==(const ChannelRates&, const ChannelRates&) = default;

private:
    double r_ul_;
    double r_dl_;
};

/// Physical-layer description that collapses to ChannelRates through the
/// Shannon rate of each link.
struct RadioParams {
    double bandwidth_hz = 0.0;
    double content_size_bits = 0.0;
    double sinr_ul = 0.0;  // linear, not dB
    double sinr_dl = 0.0;
};

ChannelRates rates_from_radio(const RadioParams& params);

/// Request popularity over items ranked 1..S.
class Popularity {
public:
    enum class Kind { uniform, zipf, explicit_weights };

    static Popularity uniform();
    static Popularity zipf(double theta);
    static Popularity explicit_weights(std::vector<double> weights);

    Kind kind() const noexcept { return kind_; }
    double theta() const noexcept { return theta_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::string describe() const;

private:
    Popularity(Kind kind, double theta, std::vector<double> weights);

    Kind kind_;
    double theta_;
    std::vector<double> weights_;
};

/// Request probability of each item; length `item_count`, sums to one.
std::vector<double> popularity_weights(const Popularity& pop, std::size_t item_count);

/// Item set, per-item Poisson request rates and the channel.
class Scenario {
public:
    /// lambda_s = lambda_total * request_prob_s.
    static Scenario from_popularity(ChannelRates rates, std::size_t item_count,
                                    double lambda_total, const Popularity& pop);
    static Scenario from_rates(ChannelRates rates, std::vector<double> lambda_s);

    const ChannelRates& rates() const noexcept { return rates_; }
    std::size_t item_count() const noexcept { return lambda_.size(); }
    std::span<const double> lambda() const noexcept { return lambda_; }
    double lambda(std::size_t s) const { return lambda_.at(s); }
    double total_lambda() const noexcept { return total_; }

    /// Normalized per-item request probabilities. When every lambda_s is
    /// zero the split falls back to uniform so the scenario can be rescaled.
    std::span<const double> request_prob() const noexcept { return request_prob_; }

    /// Same popularity split and rates, different aggregate rate.
    Scenario with_total_lambda(double lambda_total) const;
    Scenario with_rates(ChannelRates rates) const;

private:
    Scenario(ChannelRates rates, std::vector<double> lambda_s, std::vector<double> request_prob);

    ChannelRates rates_;
    std::vector<double> lambda_;
    std::vector<double> request_prob_;
    double total_ = 0.0;
};

struct Conventional {
    double beta = 0.5;
};

struct Rsuc {
    double beta = 0.5;
};

struct Rea {
    std::vector<double> update_prob;
};

using SchemeParams = std::variant<Conventional, Rsuc, Rea>;

enum class SchemeKind { conventional, rsuc, rea };

SchemeKind scheme_kind(const SchemeParams& params) noexcept;
std::string_view scheme_name(SchemeKind kind) noexcept;
std::string_view scheme_name(const SchemeParams& params) noexcept;
SchemeKind parse_scheme_kind(std::string_view name);

/// Checks beta in [0,1], every update probability in [0,1] and that the ReA
/// probability vector matches `item_count`.
void validate_scheme(const SchemeParams& params, std::size_t item_count);

/// ReA update ratio P = sum(p_s * lambda_s) / Lambda, defined as 0 when
/// Lambda is 0.
double update_ratio(const Scenario& scenario, std::span<const double> update_prob);

/// Paired latency/AoI estimate. Analytic points carry zero CIs and zero
/// deliveries.
struct PerfPoint {
    double mean_latency = 0.0;
    double mean_aoi = 0.0;
    double latency_ci95 = 0.0;
    double aoi_ci95 = 0.0;
    std::uint64_t n_delivered = 0;

    static PerfPoint analytic(double latency, double aoi) { return {latency, aoi, 0.0, 0.0, 0}; }
};

}  // namespace aoicache
