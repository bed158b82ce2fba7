#include "aoicache/optimize.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aoicache/analytic.hpp"
#include "aoicache/errors.hpp"

namespace aoicache::optimize {

namespace {

std::string fmt_num(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

/// Smallest x in [lo, hi] with pred(x) true, given pred(lo) false and
/// pred(hi) true and pred monotone. Returns the feasible end.
template <class Pred>
double bisect_feasible(double lo, double hi, Pred pred, double tol, int max_iter) {
    int iter = 0;
    while (hi - lo > tol) {
        if (++iter > max_iter) throw InternalError("bisection did not converge within the iteration cap");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval at machine resolution
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace

double p1_opt_beta(const ChannelRates& rates, double lambda_total) {
    return analytic::conv_opt_beta(rates, lambda_total);
}

double p2_condition(const ChannelRates& rates, double lambda_total, std::size_t item_count, double weight_aoi,
                    double beta) {
    const double d = rates.r_dl();
    const double first = (1.0 - lambda_total / d) / beta - 1.0;
    const double second = 1.0 / beta - 1.0;
    const double rhs = (static_cast<double>(item_count) + 3.0) * weight_aoi * d / (2.0 * rates.r_ul());
    return 1.0 / (first * first) + weight_aoi / (second * second) - rhs;
}

P2Solution p2_solve(const ChannelRates& rates, double lambda_total, std::size_t item_count, const P2Config& cfg) {
    if (item_count == 0) throw InvalidParameter("items must be >= 1");
    if (!(cfg.weight_aoi >= 0.0) || !std::isfinite(cfg.weight_aoi)) {
        throw InvalidParameter("weight_aoi must be finite and >= 0");
    }
    if (!(cfg.tol > 0.0)) throw InvalidParameter("tol must be > 0");
    if (cfg.max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
    if (!(lambda_total >= 0.0)) throw InvalidParameter("lambda_total must be >= 0");
    if (!(lambda_total < rates.r_dl())) {
        throw Overload("downlink cannot carry lambda_total=" + fmt_num(lambda_total) + " for any split (r_dl=" +
                       fmt_num(rates.r_dl()) + ")");
    }

    const double upper = 1.0 - lambda_total / rates.r_dl();
    P2Solution sol;
    if (cfg.weight_aoi == 0.0) {
        // Pure latency objective: decreasing towards beta -> 0.
        sol.beta = std::min(cfg.tol, 0.5 * upper);
        sol.boundary = true;
        sol.residual = std::fabs(p2_condition(rates, lambda_total, item_count, 0.0, sol.beta));
        return sol;
    }

    auto cond = [&](double b) { return p2_condition(rates, lambda_total, item_count, cfg.weight_aoi, b); };
    double lo = 0.0;
    double hi = upper;
    int iter = 0;
    while (hi - lo > cfg.tol) {
        if (++iter > cfg.max_iter) throw InternalError("p2 bisection did not converge within max_iter");
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (cond(mid) < 0.0 ? lo : hi) = mid;
    }
    // Pick whichever bracket end has the smaller residual; the condition is
    // steep near the upper end so the midpoint is not always best.
    const double mid = 0.5 * (lo + hi);
    double best = mid;
    double best_res = std::fabs(cond(mid));
    for (double cand : {lo, hi}) {
        if (cand <= 0.0 || cand >= upper) continue;
        const double r = std::fabs(cond(cand));
        if (r < best_res) {
            best = cand;
            best_res = r;
        }
    }
    sol.beta = best;
    sol.residual = best_res;
    sol.iterations = iter;
    return sol;
}

double theorem4_min_aoi(const ChannelRates& rates, std::size_t item_count) {
    if (item_count == 0) throw InvalidParameter("items must be >= 1");
    const double s = static_cast<double>(item_count);
    const double root = 1.0 / std::sqrt(rates.r_dl()) + std::sqrt((s + 3.0) / (2.0 * rates.r_ul()));
    return root * root;
}

double theorem4_beta(const ChannelRates& rates, std::size_t item_count) {
    if (item_count == 0) throw InvalidParameter("items must be >= 1");
    const double s = static_cast<double>(item_count);
    return 1.0 - 1.0 / (1.0 + std::sqrt((s + 3.0) * rates.r_dl() / (2.0 * rates.r_ul())));
}

double rsuc_min_beta_for_aoi(const ChannelRates& rates, std::size_t item_count, double aoi_cap) {
    const double floor = theorem4_min_aoi(rates, item_count);
    if (!(aoi_cap >= floor)) {
        throw Infeasible("aoi_cap=" + fmt_num(aoi_cap) + " is below the RSUC AoI floor " + fmt_num(floor));
    }
    const double beta_hat = theorem4_beta(rates, item_count);
    if (std::isinf(aoi_cap)) return 0.0;
    // At the floor the quadratic has a double root; rounding in its
    // discriminant would cost ~1e-8 in beta, so use the closed form.
    if (aoi_cap <= floor * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) return beta_hat;

    // (S+3)/(2 b R_UL) + 1/((1-b) R_DL) = A  <=>  A b^2 - (A + a - c) b + a = 0
    const double a = (static_cast<double>(item_count) + 3.0) / (2.0 * rates.r_ul());
    const double c = 1.0 / rates.r_dl();
    const double big_b = aoi_cap + a - c;
    const double disc = std::max(0.0, big_b * big_b - 4.0 * aoi_cap * a);
    const double root = 2.0 * a / (big_b + std::sqrt(disc));  // smaller root, cancellation-free

    auto feasible = [&](double b) {
        if (b <= 0.0) return false;
        if (b >= 1.0) return false;
        return analytic::rsuc_aoi(rates, item_count, b) <= aoi_cap;
    };
    const double delta = 1e-9 * std::max(1.0, root);
    double lo = std::max(0.0, root - delta);
    double hi = std::min(beta_hat, root + delta);
    if (feasible(lo) || !feasible(hi)) {
        lo = 0.0;
        hi = beta_hat;
    }
    return bisect_feasible(lo, hi, feasible, kBisectionTol, kBisectionMaxIter);
}

double p3_min_beta(const ChannelRates& rates, double lambda_total, std::size_t item_count, double aoi_cap) {
    if (!(lambda_total >= 0.0)) throw InvalidParameter("lambda_total must be >= 0");
    const double beta = rsuc_min_beta_for_aoi(rates, item_count, aoi_cap);
    if (!((1.0 - beta) * rates.r_dl() > lambda_total)) {
        throw Infeasible("lambda_total=" + fmt_num(lambda_total) + " exceeds the downlink rate " +
                         fmt_num((1.0 - beta) * rates.r_dl()) + " left at the minimal split beta=" +
                         fmt_num(beta) + " for aoi_cap=" + fmt_num(aoi_cap));
    }
    return beta;
}

double rsuc_capacity_at_aoi(const ChannelRates& rates, std::size_t item_count, double aoi_cap) {
    return (1.0 - rsuc_min_beta_for_aoi(rates, item_count, aoi_cap)) * rates.r_dl();
}

double p4_aoi_floor(const Scenario& scenario) {
    const auto& rates = scenario.rates();
    std::vector<double> p(scenario.item_count());
    for (std::size_t s = 0; s < p.size(); ++s) p[s] = analytic::rea_aoi_item_argmin(rates, scenario.lambda(s));
    return analytic::rea_aoi_avg(rates, scenario, p);
}

P4Solution p4_solve(const Scenario& scenario, double aoi_cap) {
    const auto& rates = scenario.rates();
    const double u = rates.r_ul();
    const double d = rates.r_dl();
    const std::size_t n = scenario.item_count();
    for (std::size_t s = 0; s < n; ++s) {
        if (!(scenario.lambda(s) > 0.0)) throw InvalidParameter("p4 requires every lambda_s > 0");
    }
    if (!(aoi_cap > 1.0 / u + 1.0 / d)) {
        throw Infeasible("aoi_cap=" + fmt_num(aoi_cap) + " must exceed 1/r_ul + 1/r_dl = " + fmt_num(1.0 / u + 1.0 / d));
    }
    const double floor = p4_aoi_floor(scenario);
    if (!(aoi_cap >= floor)) {
        throw Infeasible("aoi_cap=" + fmt_num(aoi_cap) + " is below the ReA AoI floor " + fmt_num(floor));
    }

    const double total = scenario.total_lambda();
    const double budget = static_cast<double>(n) + total * (aoi_cap - 1.0 / d);

    P4Solution sol;
    sol.p.assign(n, 1.0);
    std::vector<bool> is_clamped(n, false);
    double clamped_cost = 0.0;
    std::size_t n_clamped = 0;

    for (int iter = 1; iter <= static_cast<int>(n); ++iter) {
        sol.iterations = iter;
        double sum_sqrt = 0.0;
        for (std::size_t s = 0; s < n; ++s) {
            if (!is_clamped[s]) sum_sqrt += std::sqrt(scenario.lambda(s));
        }

        const double y = (budget - clamped_cost) / sum_sqrt;
        double disc = y * y - 4.0 / u;
        if (disc < 0.0) {
            if (y > 0.0 && disc > -1e-12 * y * y) {
                disc = 0.0;
            } else {
                throw Infeasible("aoi_cap=" + fmt_num(aoi_cap) +
                                 " cannot be met with interior update probabilities (Y^2 < 4/r_ul)");
            }
        }
        const double c = 2.0 / (y + std::sqrt(disc));  // common value of p_s * sqrt(lambda_s)
        sol.y = y;
        sol.multiplier = 1.0 / (total * (1.0 / (c * c) - 1.0 / u));

        bool clamped_any = false;
        for (std::size_t s = 0; s < n; ++s) {
            if (is_clamped[s]) continue;
            const double p = c / std::sqrt(scenario.lambda(s));
            if (p >= 1.0) {
                is_clamped[s] = true;
                clamped_any = true;
                ++n_clamped;
                sol.p[s] = 1.0;
                clamped_cost += scenario.lambda(s) / u + 1.0;
            } else {
                sol.p[s] = p;
            }
        }
        if (!clamped_any || n_clamped == n) break;
    }

    for (std::size_t s = 0; s < n; ++s) {
        if (is_clamped[s]) sol.clamped.push_back(s);
    }
    if (sol.clamped.size() == n) {
        sol.y = 0.0;
        sol.multiplier = 0.0;
    }
    sol.update_ratio = update_ratio(scenario, sol.p);
    sol.constraint_residual = analytic::rea_aoi_avg(rates, scenario, sol.p) - aoi_cap;
    return sol;
}

}  // namespace aoicache::optimize
