#include "aoicache/desim/rng.hpp"

#include <algorithm>
#include <cmath>

#include "aoicache/errors.hpp"

namespace aoicache::desim {

double exponential_from_uniform(double u, double mean) { return -mean * std::log(u); }

double draw_exponential(RandomStream& rng, double mean) {
    return exponential_from_uniform(rng.uniform_open_closed(), mean);
}

ItemSampler::ItemSampler(std::span<const double> weights) {
    if (weights.empty()) throw InvalidParameter("item weights must be non-empty");
    cumulative_.resize(weights.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!(weights[i] >= 0.0)) throw InvalidParameter("item weights must be >= 0");
        acc += weights[i];
        cumulative_[i] = acc;
    }
    if (!(acc > 0.0)) throw InvalidParameter("item weights must not all be zero");
    for (double& c : cumulative_) c /= acc;
    cumulative_.back() = 1.0;
}

std::size_t ItemSampler::select(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::size_t>(it - cumulative_.begin());
}

std::size_t ItemSampler::draw(RandomStream& rng) const {
    if (cumulative_.size() == 1) return 0;
    return select(rng.uniform());
}

std::size_t assign_item(RandomStream& rng, std::span<const double> weights) {
    return ItemSampler(weights).draw(rng);
}

}  // namespace aoicache::desim
