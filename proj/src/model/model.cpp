#include "aoicache/model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "aoicache/errors.hpp"

namespace aoicache {

namespace {

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::ostringstream os;
        os << name << " must be positive and finite (got " << value << ")";
        throw InvalidParameter(os.str());
    }
}

void require_unit_interval(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        std::ostringstream os;
        os << name << " must lie in [0, 1] (got " << value << ")";
        throw InvalidParameter(os.str());
    }
}

std::vector<double> normalized_or_uniform(std::span<const double> lambda_s) {
    const double total = std::accumulate(lambda_s.begin(), lambda_s.end(), 0.0);
    std::vector<double> prob(lambda_s.size());
    if (total > 0.0) {
        for (std::size_t s = 0; s < lambda_s.size(); ++s) prob[s] = lambda_s[s] / total;
    } else {
        std::fill(prob.begin(), prob.end(), 1.0 / static_cast<double>(lambda_s.size()));
    }
    return prob;
}

}  // namespace

ChannelRates::ChannelRates(double r_ul, double r_dl) : r_ul_(r_ul), r_dl_(r_dl) {
    require_positive(r_ul, "r_ul");
    require_positive(r_dl, "r_dl");
}

ChannelRates rates_from_radio(const RadioParams& params) {
    require_positive(params.bandwidth_hz, "bandwidth");
    require_positive(params.content_size_bits, "content_size");
    require_positive(params.sinr_ul, "sinr_ul");
    require_positive(params.sinr_dl, "sinr_dl");
    const double per_item = params.bandwidth_hz / params.content_size_bits;
    return {per_item * std::log2(1.0 + params.sinr_ul), per_item * std::log2(1.0 + params.sinr_dl)};
}

Popularity::Popularity(Kind kind, double theta, std::vector<double> weights)
    : kind_(kind), theta_(theta), weights_(std::move(weights)) {}

Popularity Popularity::uniform() { return {Kind::uniform, 0.0, {}}; }

Popularity Popularity::zipf(double theta) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw InvalidParameter("zipf theta must be a finite value >= 0");
    }
    return {Kind::zipf, theta, {}};
}

Popularity Popularity::explicit_weights(std::vector<double> weights) {
    if (weights.empty()) throw InvalidParameter("explicit popularity weights must be non-empty");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw InvalidParameter("explicit popularity weights must be finite and >= 0");
        }
        total += w;
    }
    if (!(total > 0.0)) throw InvalidParameter("explicit popularity weights must not all be zero");
    return {Kind::explicit_weights, 0.0, std::move(weights)};
}

std::string Popularity::describe() const {
    switch (kind_) {
        case Kind::uniform:
            return "uniform";
        case Kind::zipf: {
            std::ostringstream os;
            os << "zipf(" << theta_ << ")";
            return os.str();
        }
        case Kind::explicit_weights:
            return "explicit";
    }
    return "?";
}

std::vector<double> popularity_weights(const Popularity& pop, std::size_t item_count) {
    if (item_count == 0) throw InvalidParameter("items must be >= 1");
    std::vector<double> w(item_count);
    switch (pop.kind()) {
        case Popularity::Kind::uniform:
            std::fill(w.begin(), w.end(), 1.0);
            break;
        case Popularity::Kind::zipf:
            for (std::size_t s = 0; s < item_count; ++s) {
                w[s] = std::pow(static_cast<double>(s + 1), -pop.theta());
            }
            break;
        case Popularity::Kind::explicit_weights:
            if (pop.weights().size() != item_count) {
                std::ostringstream os;
                os << "weights has " << pop.weights().size() << " entries but items = " << item_count;
                throw InvalidParameter(os.str());
            }
            w = pop.weights();
            break;
    }
    // Summing in reverse adds the small tail terms first.
    const double total = std::accumulate(w.rbegin(), w.rend(), 0.0);
    for (double& x : w) x /= total;
    return w;
}

Scenario::Scenario(ChannelRates rates, std::vector<double> lambda_s, std::vector<double> request_prob)
    : rates_(rates), lambda_(std::move(lambda_s)), request_prob_(std::move(request_prob)) {
    total_ = std::accumulate(lambda_.begin(), lambda_.end(), 0.0);
}

Scenario Scenario::from_popularity(ChannelRates rates, std::size_t item_count, double lambda_total,
                                   const Popularity& pop) {
    if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total)) {
        throw InvalidParameter("lambda_total must be finite and >= 0");
    }
    auto prob = popularity_weights(pop, item_count);
    std::vector<double> lambda(item_count);
    for (std::size_t s = 0; s < item_count; ++s) lambda[s] = lambda_total * prob[s];
    return {rates, std::move(lambda), std::move(prob)};
}

Scenario Scenario::from_rates(ChannelRates rates, std::vector<double> lambda_s) {
    if (lambda_s.empty()) throw InvalidParameter("lambda_list must contain at least one item");
    for (double l : lambda_s) {
        if (!(l >= 0.0) || !std::isfinite(l)) {
            throw InvalidParameter("lambda_list entries must be finite and >= 0");
        }
    }
    auto prob = normalized_or_uniform(lambda_s);
    return {rates, std::move(lambda_s), std::move(prob)};
}

Scenario Scenario::with_total_lambda(double lambda_total) const {
    if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total)) {
        throw InvalidParameter("lambda_total must be finite and >= 0");
    }
    std::vector<double> lambda(request_prob_.size());
    for (std::size_t s = 0; s < lambda.size(); ++s) lambda[s] = lambda_total * request_prob_[s];
    return {rates_, std::move(lambda), request_prob_};
}

Scenario Scenario::with_rates(ChannelRates rates) const { return {rates, lambda_, request_prob_}; }

SchemeKind scheme_kind(const SchemeParams& params) noexcept {
    return static_cast<SchemeKind>(params.index());
}

std::string_view scheme_name(SchemeKind kind) noexcept {
    switch (kind) {
        case SchemeKind::conventional:
            return "conventional";
        case SchemeKind::rsuc:
            return "rsuc";
        case SchemeKind::rea:
            return "rea";
    }
    return "?";
}

std::string_view scheme_name(const SchemeParams& params) noexcept { return scheme_name(scheme_kind(params)); }

SchemeKind parse_scheme_kind(std::string_view name) {
    if (name == "conventional" || name == "conv") return SchemeKind::conventional;
    if (name == "rsuc") return SchemeKind::rsuc;
    if (name == "rea") return SchemeKind::rea;
    throw InvalidParameter("scheme must be one of conventional, rsuc, rea (got '" + std::string(name) + "')");
}

void validate_scheme(const SchemeParams& params, std::size_t item_count) {
    if (const auto* c = std::get_if<Conventional>(&params)) {
        require_unit_interval(c->beta, "beta");
    } else if (const auto* r = std::get_if<Rsuc>(&params)) {
        require_unit_interval(r->beta, "beta");
    } else {
        const auto& rea = std::get<Rea>(params);
        if (rea.update_prob.size() != item_count) {
            std::ostringstream os;
            os << "p has " << rea.update_prob.size() << " entries but items = " << item_count;
            throw InvalidParameter(os.str());
        }
        for (double p : rea.update_prob) require_unit_interval(p, "p");
    }
}

double update_ratio(const Scenario& scenario, std::span<const double> update_prob) {
    if (update_prob.size() != scenario.item_count()) {
        throw InvalidParameter("p length must equal items");
    }
    const double total = scenario.total_lambda();
    if (total <= 0.0) return 0.0;
    double acc = 0.0;
    for (std::size_t s = 0; s < update_prob.size(); ++s) acc += update_prob[s] * scenario.lambda(s);
    return acc / total;
}

}  // namespace aoicache
