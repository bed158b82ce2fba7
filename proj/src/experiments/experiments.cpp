#include "aoicache/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <sstream>

#include <omp.h>

#include "aoicache/analytic.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/optimize.hpp"

namespace aoicache::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Cell num(double v) { return std::isnan(v) ? Cell{} : Cell{v}; }
Cell count(std::uint64_t v) { return Cell{static_cast<std::int64_t>(v)}; }
Cell str(std::string_view s) { return Cell{std::string(s)}; }

/// Runs fn(i) for i in [0, n) across OpenMP threads and rethrows the first
/// failure (by index) on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    const int threads = workers > 0 ? static_cast<int>(workers) : omp_get_max_threads();
    const auto count = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t i = 0; i < count; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

bool has_scheme(const SweepSpec& spec, SchemeKind k) {
    return std::find(spec.schemes.begin(), spec.schemes.end(), k) != spec.schemes.end();
}

void check_grid(const std::vector<double>& grid, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0) || !std::isfinite(grid[i])) {
            throw InvalidParameter(std::string(what) + ": values must be positive and finite");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw InvalidParameter(std::string(what) + ": values must be strictly increasing");
        }
    }
}

std::vector<double> broadcast(double p, std::size_t n) { return std::vector<double>(n, p); }

std::string popularity_label(const Popularity& pop) { return pop.describe(); }

}  // namespace

Family parse_family(std::string_view name) {
    if (name == "validation") return Family::validation;
    if (name == "aoi_latency_tradeoff" || name == "tradeoff") return Family::aoi_latency_tradeoff;
    if (name == "capacity_aoi" || name == "capacity") return Family::capacity_aoi;
    if (name == "scheme_compare" || name == "compare") return Family::scheme_compare;
    if (name == "trace") return Family::trace;
    throw InvalidParameter("family: unknown value '" + std::string(name) +
                           "' (validation, aoi_latency_tradeoff, capacity_aoi, scheme_compare, trace)");
}

std::string_view family_name(Family family) noexcept {
    switch (family) {
        case Family::validation:
            return "validation";
        case Family::aoi_latency_tradeoff:
            return "aoi_latency_tradeoff";
        case Family::capacity_aoi:
            return "capacity_aoi";
        case Family::scheme_compare:
            return "scheme_compare";
        case Family::trace:
            return "trace";
    }
    return "?";
}

std::string_view status_name(RowStatus status) noexcept {
    switch (status) {
        case RowStatus::ok:
            return "ok";
        case RowStatus::infeasible:
            return "infeasible";
        case RowStatus::overloaded:
            return "overloaded";
    }
    return "?";
}

desim::SimConfig make_sim_config(const Scenario& scenario, const SchemeParams& scheme, const SimOptions& opts) {
    return desim::SimConfig{scenario,     scheme,        opts.seed,
                            opts.warmup,  opts.stop,     opts.replications,
                            opts.service, opts.divergence_bound,
                            std::nullopt, {}};
}

// ---- ArrivalTrace ----

void ArrivalTrace::validate() const { profile().validate(); }

desim::RateProfile ArrivalTrace::profile() const { return desim::RateProfile{time, lambda}; }

double ArrivalTrace::default_horizon() const {
    validate();
    if (time.size() < 2) throw InvalidParameter("horizon: required for a single-segment trace");
    return time.back() + time.back() / static_cast<double>(time.size() - 1);
}

double ArrivalTrace::mean_rate(double horizon) const {
    if (!(horizon > 0.0)) throw InvalidParameter("horizon must be positive");
    double mass = 0.0;
    for (std::size_t i = 0; i < time.size() && time[i] < horizon; ++i) {
        const double end = i + 1 < time.size() ? std::min(time[i + 1], horizon) : horizon;
        mass += lambda[i] * (end - time[i]);
    }
    return mass / horizon;
}

ArrivalTrace ArrivalTrace::parse_csv(std::istream& in) {
    ArrivalTrace t;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        if (!header) {
            std::string h;
            for (char c : line) {
                if (c != ' ' && c != '\t') h += c;
            }
            if (h != "time,lambda") throw InvalidParameter("trace: header must be 'time,lambda'");
            header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw InvalidParameter("trace line " + std::to_string(lineno) + ": expected two fields");
        try {
            std::size_t used = 0;
            const std::string a = line.substr(0, comma);
            const std::string b = line.substr(comma + 1);
            const double tv = std::stod(a, &used);
            if (a.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("time");
            const double lv = std::stod(b, &used);
            if (b.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("lambda");
            t.time.push_back(tv);
            t.lambda.push_back(lv);
        } catch (const std::logic_error&) {
            throw InvalidParameter("trace line " + std::to_string(lineno) + ": not a number pair: '" + line + "'");
        }
    }
    if (!header) throw InvalidParameter("trace: empty file");
    if (t.time.empty()) throw InvalidParameter("trace: no segments");
    try {
        t.validate();
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(std::string("trace: ") + e.what());
    }
    return t;
}

ArrivalTrace ArrivalTrace::load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("trace: cannot open '" + path.string() + "'");
    return parse_csv(in);
}

// ---- SweepSpec ----

void SweepSpec::validate() const {
    if (items < 1) throw InvalidParameter("items must be >= 1");
    check_grid(grid, "grid");
    if (schemes.empty()) throw InvalidParameter("schemes: at least one scheme is required");
    if (!(lambda_total >= 0.0) || !std::isfinite(lambda_total)) throw InvalidParameter("lambda_total must be >= 0");
    for (double b : conv_betas) {
        if (!(b > 0.0 && b < 1.0)) throw InvalidParameter("conv_beta values must lie in (0, 1)");
    }
    for (double b : rsuc_betas) {
        if (!(b > 0.0 && b < 1.0)) throw InvalidParameter("rsuc_beta values must lie in (0, 1)");
    }
    for (double p : rea_p) {
        if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("rea_p values must lie in (0, 1]");
    }
    if (!(latency_tol >= 0.0 && aoi_tol >= 0.0 && rea_aoi_tol >= 0.0)) {
        throw InvalidParameter("tolerances must be >= 0");
    }
    if (sim.replications < 1) throw InvalidParameter("replications must be >= 1");
    for (std::size_t s : item_grid) {
        if (s < 1) throw InvalidParameter("item_grid values must be >= 1");
    }
    for (double th : theta_grid) {
        if (!(th >= 0.0) || !std::isfinite(th)) throw InvalidParameter("theta_grid values must be >= 0");
    }
    if (!(per_item_cap > 0.0)) throw InvalidParameter("per_item_cap must be positive");
    if (family == Family::aoi_latency_tradeoff || family == Family::capacity_aoi || family == Family::scheme_compare) {
        if (!has_scheme(*this, SchemeKind::rsuc) && !has_scheme(*this, SchemeKind::rea)) {
            throw InvalidParameter("schemes: family " + std::string(family_name(family)) + " needs rsuc or rea");
        }
    }
    if (family == Family::trace) {
        if (!trace) throw InvalidParameter("trace: family trace needs a trace file");
        trace->validate();
        if (horizon && !(*horizon > 0.0)) throw InvalidParameter("horizon must be positive");
        if (trace_conv_beta && !(*trace_conv_beta > 0.0 && *trace_conv_beta < 1.0)) {
            throw InvalidParameter("conv_beta must lie in (0, 1)");
        }
    }
}

std::vector<double> default_cap_grid(const ChannelRates& rates, std::size_t items) {
    const double floor = std::min(optimize::theorem4_min_aoi(rates, items), 1.0 / rates.r_ul() + 1.0 / rates.r_dl());
    const double lo = std::log(1.05 * floor);
    const double hi = std::log(100.0 * floor);
    constexpr int n = 30;
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i) grid[i] = std::exp(lo + (hi - lo) * i / (n - 1));
    return grid;
}

// ---- validation ----

std::vector<ValidationRow> run_validation(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> grid = spec.grid.empty() ? std::vector<double>{100.0, 200.0, 300.0, 400.0} : spec.grid;

    std::vector<ValidationRow> rows;
    for (double lambda : grid) {
        for (SchemeKind kind : spec.schemes) {
            const auto& knobs = kind == SchemeKind::conventional ? spec.conv_betas
                                : kind == SchemeKind::rsuc       ? spec.rsuc_betas
                                                                 : spec.rea_p;
            for (double knob : knobs) {
                ValidationRow r;
                r.lambda = lambda;
                r.scheme = kind;
                r.knob = knob;
                rows.push_back(r);
            }
        }
    }

    auto scheme_of = [&](const ValidationRow& r) -> SchemeParams {
        switch (r.scheme) {
            case SchemeKind::conventional:
                return Conventional{r.knob};
            case SchemeKind::rsuc:
                return Rsuc{r.knob};
            case SchemeKind::rea:
                break;
        }
        return Rea{broadcast(r.knob, spec.items)};
    };

    for (auto& r : rows) {
        const Scenario sc = Scenario::from_popularity(spec.rates, spec.items, r.lambda, spec.popularity);
        try {
            switch (r.scheme) {
                case SchemeKind::conventional:
                    r.analytic = PerfPoint::analytic(analytic::conv_latency(spec.rates, r.lambda, r.knob),
                                                     analytic::conv_aoi_at(spec.rates, r.lambda, r.knob));
                    break;
                case SchemeKind::rsuc:
                    r.analytic = PerfPoint::analytic(analytic::rsuc_latency(spec.rates, r.lambda, r.knob),
                                                     analytic::rsuc_aoi(spec.rates, spec.items, r.knob));
                    break;
                case SchemeKind::rea: {
                    const auto p = broadcast(r.knob, spec.items);
                    r.analytic = PerfPoint::analytic(
                        analytic::rea_latency(spec.rates, r.lambda, update_ratio(sc, p)),
                        analytic::rea_aoi_avg(spec.rates, sc, p));
                    break;
                }
            }
        } catch (const Overload& e) {
            r.analytic_stable = false;
            r.analytic = PerfPoint::analytic(kNaN, kNaN);
            r.diagnostic = e.what();
        }
    }

    if (!spec.simulate) return rows;

    parallel_for(rows.size(), spec.workers, [&](std::size_t i) {
        ValidationRow& r = rows[i];
        if (!r.analytic_stable) return;
        const Scenario sc = Scenario::from_popularity(spec.rates, spec.items, r.lambda, spec.popularity);
        const desim::SimResult res = desim::simulate(make_sim_config(sc, scheme_of(r), spec.sim));
        r.simulated = true;
        r.sim = res.perf;
        r.overloaded = res.overloaded;
        r.diagnostic = res.diagnostic;
        for (const auto& rep : res.replications) {
            for (const auto& st : rep.stations) {
                if (st.mean_in_system > 0.0) {
                    const double err = std::abs(st.mean_in_system - st.arrival_rate * st.mean_sojourn) / st.mean_in_system;
                    r.little_max_rel_err = std::max(r.little_max_rel_err, err);
                }
            }
        }
        if (r.overloaded) return;
        const double aoi_tol = r.scheme == SchemeKind::rea ? spec.rea_aoi_tol : spec.aoi_tol;
        r.latency_flag = std::abs(r.analytic.mean_latency - r.sim.mean_latency) >
                         r.sim.latency_ci95 + spec.latency_tol * r.analytic.mean_latency;
        r.aoi_flag = std::abs(r.analytic.mean_aoi - r.sim.mean_aoi) > r.sim.aoi_ci95 + aoi_tol * r.analytic.mean_aoi;
    });
    return rows;
}

Table validation_table(const std::vector<ValidationRow>& rows) {
    Table t({"lambda", "scheme", "beta", "p", "status", "analytic_latency", "analytic_aoi", "sim_latency",
             "sim_latency_ci95", "sim_aoi", "sim_aoi_ci95", "n_delivered", "latency_rel_err", "aoi_rel_err",
             "latency_flag", "aoi_flag", "little_max_rel_err"});
    for (const auto& r : rows) {
        const bool rea = r.scheme == SchemeKind::rea;
        std::string status = "analytic_only";
        if (!r.analytic_stable) {
            status = "unstable";
        } else if (r.overloaded) {
            status = "overloaded";
        } else if (r.simulated) {
            status = "ok";
        }
        const bool cmp = r.simulated && !r.overloaded;
        t.add_row({r.lambda, str(scheme_name(r.scheme)), rea ? Cell{} : Cell{r.knob}, rea ? Cell{r.knob} : Cell{},
                   str(status), num(r.analytic.mean_latency), num(r.analytic.mean_aoi),
                   r.simulated ? num(r.sim.mean_latency) : Cell{}, r.simulated ? num(r.sim.latency_ci95) : Cell{},
                   r.simulated ? num(r.sim.mean_aoi) : Cell{}, r.simulated ? num(r.sim.aoi_ci95) : Cell{},
                   r.simulated ? count(r.sim.n_delivered) : Cell{},
                   cmp ? num(r.sim.mean_latency / r.analytic.mean_latency - 1.0) : Cell{},
                   cmp ? num(r.sim.mean_aoi / r.analytic.mean_aoi - 1.0) : Cell{},
                   cmp ? count(r.latency_flag) : Cell{}, cmp ? count(r.aoi_flag) : Cell{},
                   r.simulated ? num(r.little_max_rel_err) : Cell{}});
    }
    return t;
}

// ---- trade-off ----

namespace {

TradeoffRow rsuc_tradeoff_row(const ChannelRates& rates, std::size_t items, double lambda, double cap) {
    TradeoffRow row;
    row.aoi_cap = cap;
    row.scheme = SchemeKind::rsuc;
    try {
        row.knob = optimize::p3_min_beta(rates, lambda, items, cap);
        row.latency = analytic::rsuc_latency(rates, lambda, row.knob);
        row.aoi = analytic::rsuc_aoi(rates, items, row.knob);
    } catch (const Infeasible&) {
        row.status = RowStatus::infeasible;
    } catch (const Overload&) {
        row.status = RowStatus::overloaded;
    }
    return row;
}

TradeoffRow rea_tradeoff_row(const ChannelRates& rates, const Scenario& sc, double cap) {
    TradeoffRow row;
    row.aoi_cap = cap;
    row.scheme = SchemeKind::rea;
    try {
        const auto sol = optimize::p4_solve(sc, cap);
        row.knob = sol.update_ratio;
        row.update_prob = sol.p;
        row.aoi = analytic::rea_aoi_avg(rates, sc, sol.p);
        row.latency = analytic::rea_latency(rates, sc.total_lambda(), sol.update_ratio);
    } catch (const Infeasible&) {
        row.status = RowStatus::infeasible;
    } catch (const Overload&) {
        row.status = RowStatus::overloaded;
    }
    return row;
}

std::vector<TradeoffRow> tradeoff_rows(const SweepSpec& spec, const ChannelRates& rates, std::size_t items,
                                       const Popularity& pop) {
    const std::vector<double> caps = spec.grid.empty() ? default_cap_grid(rates, items) : spec.grid;
    const Scenario sc = Scenario::from_popularity(rates, items, spec.lambda_total, pop);
    std::vector<TradeoffRow> rows;
    for (double cap : caps) {
        if (has_scheme(spec, SchemeKind::rsuc)) rows.push_back(rsuc_tradeoff_row(rates, items, spec.lambda_total, cap));
        if (has_scheme(spec, SchemeKind::rea)) rows.push_back(rea_tradeoff_row(rates, sc, cap));
    }
    return rows;
}

std::vector<Cell> tradeoff_cells(const TradeoffRow& r) {
    const bool ok = r.status == RowStatus::ok;
    const bool rsuc = r.scheme == SchemeKind::rsuc;
    return {r.aoi_cap,
            str(scheme_name(r.scheme)),
            str(status_name(r.status)),
            ok && rsuc ? Cell{r.knob} : Cell{},
            ok && rsuc ? Cell{1.0 - r.knob} : Cell{},
            ok && !rsuc ? Cell{r.knob} : Cell{},
            ok && !rsuc ? Cell{1.0 - r.knob} : Cell{},
            ok ? Cell{r.latency} : Cell{},
            ok ? Cell{r.aoi} : Cell{}};
}

const std::vector<std::string> kTradeoffColumns{"aoi_cap", "scheme", "status", "beta", "one_minus_beta",
                                                "update_ratio", "one_minus_update_ratio", "latency", "aoi"};

}  // namespace

std::vector<TradeoffRow> run_aoi_latency_tradeoff(const SweepSpec& spec) {
    spec.validate();
    return tradeoff_rows(spec, spec.rates, spec.items, spec.popularity);
}

Table tradeoff_table(const std::vector<TradeoffRow>& rows) {
    Table t(kTradeoffColumns);
    for (const auto& r : rows) t.add_row(tradeoff_cells(r));
    return t;
}

// ---- capacity ----

double rea_capacity_at_aoi(const ChannelRates& rates, std::size_t items, const Popularity& pop, double aoi_cap,
                           double rel_tol) {
    if (!(aoi_cap > 1.0 / rates.r_ul() + 1.0 / rates.r_dl())) return 0.0;
    auto feasible = [&](double lambda) {
        const Scenario sc = Scenario::from_popularity(rates, items, lambda, pop);
        try {
            const auto sol = optimize::p4_solve(sc, aoi_cap);
            return analytic::rea_stable(rates, lambda, sol.update_ratio);
        } catch (const Infeasible&) {
            return false;
        }
    };
    double lo = 0.0;
    double hi = rates.r_dl();
    for (int it = 0; it < 200 && hi - lo > rel_tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lo;
}

std::vector<CapacityRow> run_capacity_aoi(const SweepSpec& spec) {
    spec.validate();
    const std::vector<double> caps = spec.grid.empty() ? default_cap_grid(spec.rates, spec.items) : spec.grid;
    std::vector<CapacityRow> rows;
    for (double cap : caps) {
        if (has_scheme(spec, SchemeKind::rsuc)) {
            CapacityRow r;
            r.aoi_cap = cap;
            r.scheme = SchemeKind::rsuc;
            try {
                r.knob = optimize::rsuc_min_beta_for_aoi(spec.rates, spec.items, cap);
                r.capacity = optimize::rsuc_capacity_at_aoi(spec.rates, spec.items, cap);
            } catch (const Infeasible&) {
                r.status = RowStatus::infeasible;
            }
            rows.push_back(r);
        }
        if (has_scheme(spec, SchemeKind::rea)) {
            CapacityRow r;
            r.aoi_cap = cap;
            r.scheme = SchemeKind::rea;
            r.capacity = rea_capacity_at_aoi(spec.rates, spec.items, spec.popularity, cap);
            if (r.capacity > 0.0) {
                const Scenario sc = Scenario::from_popularity(spec.rates, spec.items, r.capacity, spec.popularity);
                r.knob = optimize::p4_solve(sc, cap).update_ratio;
            } else {
                r.status = RowStatus::infeasible;
            }
            rows.push_back(r);
        }
    }
    return rows;
}

Table capacity_table(const std::vector<CapacityRow>& rows) {
    Table t({"aoi_cap", "scheme", "status", "capacity", "beta", "update_ratio"});
    for (const auto& r : rows) {
        const bool ok = r.status == RowStatus::ok;
        const bool rsuc = r.scheme == SchemeKind::rsuc;
        t.add_row({r.aoi_cap, str(scheme_name(r.scheme)), str(status_name(r.status)), ok ? Cell{r.capacity} : Cell{},
                   ok && rsuc ? Cell{r.knob} : Cell{}, ok && !rsuc ? Cell{r.knob} : Cell{}});
    }
    return t;
}

// ---- scheme comparison ----

SchemeCompareResult run_scheme_compare(const SweepSpec& spec) {
    spec.validate();
    const std::vector<ChannelRates> rate_grid = spec.rate_grid.empty() ? std::vector<ChannelRates>{spec.rates} : spec.rate_grid;
    const std::vector<std::size_t> item_grid = spec.item_grid.empty() ? std::vector<std::size_t>{spec.items} : spec.item_grid;
    std::vector<Popularity> pops;
    if (spec.theta_grid.empty()) {
        pops.push_back(spec.popularity);
    } else {
        pops.push_back(Popularity::uniform());
        for (double th : spec.theta_grid) pops.push_back(Popularity::zipf(th));
    }

    SchemeCompareResult out;
    for (const auto& rates : rate_grid) {
        for (std::size_t s : item_grid) {
            for (const auto& pop : pops) out.configs.push_back(CompareConfig{rates, s, pop});
        }
    }
    out.curves.resize(out.configs.size());
    for (std::size_t k = 0; k < out.configs.size(); ++k) {
        const auto& c = out.configs[k];
        out.curves[k] = tradeoff_rows(spec, c.rates, c.items, c.popularity);
        if (!has_scheme(spec, SchemeKind::rea)) continue;
        const Scenario sc = Scenario::from_popularity(c.rates, c.items, spec.lambda_total, c.popularity);
        try {
            const auto sol = optimize::p4_solve(sc, spec.per_item_cap);
            for (std::size_t i = 0; i < c.items; ++i) {
                out.per_item.push_back(PerItemRow{c, i, sc.lambda(i), sol.p[i],
                                                  analytic::rea_aoi_item(c.rates, sc.lambda(i), sol.p[i])});
            }
        } catch (const Infeasible& e) {
            std::ostringstream os;
            os << "r_ul=" << c.rates.r_ul() << " r_dl=" << c.rates.r_dl() << " items=" << c.items << " "
               << popularity_label(c.popularity) << ": " << e.what();
            out.notes.push_back(os.str());
        }
    }
    return out;
}

Table scheme_compare_table(const SchemeCompareResult& result) {
    std::vector<std::string> cols{"r_ul", "r_dl", "items", "popularity"};
    cols.insert(cols.end(), kTradeoffColumns.begin(), kTradeoffColumns.end());
    Table t(cols);
    for (std::size_t k = 0; k < result.configs.size(); ++k) {
        const auto& c = result.configs[k];
        for (const auto& r : result.curves[k]) {
            std::vector<Cell> row{c.rates.r_ul(), c.rates.r_dl(), count(c.items), str(popularity_label(c.popularity))};
            auto rest = tradeoff_cells(r);
            row.insert(row.end(), rest.begin(), rest.end());
            t.add_row(std::move(row));
        }
    }
    return t;
}

Table per_item_table(const SchemeCompareResult& result) {
    Table t({"r_ul", "r_dl", "items", "popularity", "rank", "lambda", "p", "aoi"});
    for (const auto& r : result.per_item) {
        t.add_row({r.config.rates.r_ul(), r.config.rates.r_dl(), count(r.config.items),
                   str(popularity_label(r.config.popularity)), count(r.item + 1), r.lambda, r.update_prob, r.aoi});
    }
    return t;
}

// ---- trace ----

std::vector<TraceRow> run_trace(const ArrivalTrace& trace, const std::vector<SchemeParams>& schemes,
                                const Scenario& scenario_template, const SimOptions& opts, double horizon) {
    trace.validate();
    if (!(horizon > 0.0)) throw InvalidParameter("horizon must be positive");
    const double mean = trace.mean_rate(horizon);

    std::vector<desim::SimResult> results(schemes.size());
    std::vector<desim::SimConfig> cfgs;
    for (const auto& s : schemes) {
        auto cfg = make_sim_config(scenario_template, s, opts);
        cfg.arrival_profile = trace.profile();
        cfg.bucket_edges = trace.time;
        cfg.stop = desim::StopRule{desim::StopRule::Kind::duration, horizon};
        desim::validate(cfg);
        cfgs.push_back(std::move(cfg));
    }
    for (std::size_t i = 0; i < cfgs.size(); ++i) results[i] = desim::simulate(cfgs[i]);

    std::vector<TraceRow> rows;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const auto& s = schemes[i];
        const auto& res = results[i];
        double knob = 0.0;
        if (const auto* c = std::get_if<Conventional>(&s)) knob = c->beta;
        if (const auto* r = std::get_if<Rsuc>(&s)) knob = r->beta;
        if (const auto* a = std::get_if<Rea>(&s)) knob = update_ratio(scenario_template.with_total_lambda(1.0), a->update_prob);
        for (std::size_t k = 0; k < trace.time.size() && trace.time[k] < horizon; ++k) {
            TraceRow row;
            row.scheme = scheme_kind(s);
            row.knob = knob;
            row.bucket = static_cast<std::int64_t>(k);
            row.start = trace.time[k];
            row.end = k + 1 < trace.time.size() ? std::min(trace.time[k + 1], horizon) : horizon;
            row.lambda = trace.lambda[k];
            row.perf = res.buckets.at(k);
            row.overloaded = res.overloaded;
            row.diagnostic = res.diagnostic;
            rows.push_back(row);
        }
        TraceRow all;
        all.scheme = scheme_kind(s);
        all.knob = knob;
        all.bucket = -1;
        all.start = 0.0;
        all.end = horizon;
        all.lambda = mean;
        all.perf = res.perf;
        all.overloaded = res.overloaded;
        all.diagnostic = res.diagnostic;
        rows.push_back(all);
    }
    return rows;
}

std::vector<TraceRow> run_trace(const SweepSpec& spec) {
    spec.validate();
    const ArrivalTrace& trace = *spec.trace;
    const double horizon = spec.horizon ? *spec.horizon : trace.default_horizon();
    const double mean = trace.mean_rate(horizon);
    const Scenario tmpl = Scenario::from_popularity(spec.rates, spec.items, mean, spec.popularity);

    std::vector<SchemeParams> schemes;
    for (SchemeKind kind : spec.schemes) {
        switch (kind) {
            case SchemeKind::conventional:
                schemes.push_back(Conventional{spec.trace_conv_beta ? *spec.trace_conv_beta
                                                                    : optimize::p1_opt_beta(spec.rates, mean)});
                break;
            case SchemeKind::rsuc:
                for (double b : spec.rsuc_betas) schemes.push_back(Rsuc{b});
                break;
            case SchemeKind::rea:
                for (double p : spec.rea_p) schemes.push_back(Rea{broadcast(p, spec.items)});
                break;
        }
    }
    return run_trace(trace, schemes, tmpl, spec.sim, horizon);
}

Table trace_table(const std::vector<TraceRow>& rows) {
    Table t({"scheme", "knob", "bucket", "start", "end", "lambda", "latency", "latency_ci95", "aoi", "aoi_ci95",
             "n_delivered", "status"});
    for (const auto& r : rows) {
        const bool any = r.perf.n_delivered > 0;
        t.add_row({str(scheme_name(r.scheme)), r.knob, r.bucket < 0 ? str("all") : Cell{r.bucket}, r.start, r.end,
                   r.lambda, any ? Cell{r.perf.mean_latency} : Cell{}, any ? Cell{r.perf.latency_ci95} : Cell{},
                   any ? Cell{r.perf.mean_aoi} : Cell{}, any ? Cell{r.perf.aoi_ci95} : Cell{},
                   count(r.perf.n_delivered), str(r.overloaded ? "overloaded" : "ok")});
    }
    return t;
}

Table run_sweep(const SweepSpec& spec) {
    switch (spec.family) {
        case Family::validation:
            return validation_table(run_validation(spec));
        case Family::aoi_latency_tradeoff:
            return tradeoff_table(run_aoi_latency_tradeoff(spec));
        case Family::capacity_aoi:
            return capacity_table(run_capacity_aoi(spec));
        case Family::scheme_compare:
            return scheme_compare_table(run_scheme_compare(spec));
        case Family::trace:
            return trace_table(run_trace(spec));
    }
    throw InternalError("unknown family");
}

}  // namespace aoicache::experiments
