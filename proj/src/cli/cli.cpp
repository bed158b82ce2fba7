#include "aoicache/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>

#include <omp.h>

#include "CLI11.hpp"

#include "aoicache/analytic.hpp"
#include "aoicache/config.hpp"
#include "aoicache/desim/simulator.hpp"
#include "aoicache/errors.hpp"
#include "aoicache/experiments.hpp"
#include "aoicache/optimize.hpp"
#include "aoicache/table.hpp"

namespace aoicache::cli {

namespace {

struct KeyDef {
    const char* name;
    const char* help;
    bool list = false;
};

const std::vector<KeyDef> kScenarioKeys{
    {"r_ul", "full-band uplink rate, items/s"},
    {"r_dl", "full-band downlink rate, items/s"},
    {"items", "number of content items S"},
    {"lambda_total", "aggregate request rate, requests/s"},
    {"popularity", "uniform | zipf | explicit"},
    {"theta", "Zipf exponent"},
    {"weights", "explicit popularity weights", true},
    {"lambda_list", "per-item request rates (instead of lambda_total)", true},
    {"scheme", "conventional | rsuc | rea"},
    {"beta", "bandwidth split; 'opt' selects the latency-optimal conventional split"},
    {"p", "ReA update probabilities; one value applies to every item", true},
};

const std::vector<KeyDef> kOutputKeys{
    {"format", "text | csv | json (default: from --output extension, else text)"},
    {"output", "write the result table to this file"},
    {"precision", "significant digits of text output (default 6)"},
};

const std::vector<KeyDef> kSimKeys{
    {"seed", "64-bit seed (default 20210601)"},
    {"replications", "independent replications (default 10)"},
    {"warmup", "discarded fraction of the stop value (default 0.1)"},
    {"warmup_time", "discarded initial seconds (instead of warmup)"},
    {"requests", "post-warmup requests per replication (default 1e6)"},
    {"duration", "arrival horizon in seconds (instead of requests)"},
    {"service", "exponential | deterministic"},
    {"divergence_bound", "queue length that aborts a run as overloaded (default 1e7)"},
    {"workers", "OpenMP threads (default: all)"},
};

const std::vector<KeyDef> kAnalyticKeys{
    {"metric", "latency | aoi | capacity | min-latency | opt-beta | threshold | moments | item-aoi | all | rates | popularity"},
    {"bandwidth", "radio bandwidth b, Hz (metric rates)"},
    {"content_size", "content size l, bits (metric rates)"},
    {"sinr_ul", "linear uplink SINR (metric rates)"},
    {"sinr_dl", "linear downlink SINR (metric rates)"},
};

const std::vector<KeyDef> kOptimizeKeys{
    {"problem", "p1 | p2 | p3 | p4 | min-aoi | capacity-at-aoi"},
    {"aoi_cap", "AoI requirement, seconds"},
    {"weight_aoi", "AoI weight W_A of p2 (default 1)"},
};

const std::vector<KeyDef> kSweepKeys{
    {"family", "validation | aoi_latency_tradeoff | capacity_aoi | scheme_compare | trace"},
    {"r_ul", "full-band uplink rate, items/s (default 1000)"},
    {"r_dl", "full-band downlink rate, items/s (default 1000)"},
    {"items", "number of content items S (default 1)"},
    {"lambda_total", "fixed aggregate rate of trade-off families (default 200)"},
    {"popularity", "uniform | zipf | explicit"},
    {"theta", "Zipf exponent"},
    {"weights", "explicit popularity weights", true},
    {"grid", "swept values: Lambda (validation) or AoI caps", true},
    {"schemes", "subset of conventional, rsuc, rea", true},
    {"conv_beta", "conventional splits (trace: one value, default optimal)", true},
    {"rsuc_beta", "RSUC splits", true},
    {"rea_p", "ReA update probabilities", true},
    {"simulate", "run simulations in the validation family (default true)"},
    {"latency_tol", "relative latency tolerance (default 0.03)"},
    {"aoi_tol", "relative AoI tolerance (default 0.03)"},
    {"rea_aoi_tol", "relative ReA AoI tolerance (default 0.05)"},
    {"item_grid", "scheme_compare item counts", true},
    {"theta_grid", "scheme_compare Zipf exponents (uniform is always included)", true},
    {"rate_grid", "scheme_compare rate pairs as UL:DL", true},
    {"per_item_cap", "AoI cap of the per-item ReA table (default 0.1)"},
    {"per_item_output", "file for the per-item ReA table"},
    {"trace", "arrival trace CSV with header time,lambda"},
    {"horizon", "trace horizon, seconds"},
};

std::vector<KeyDef> concat(std::initializer_list<const std::vector<KeyDef>*> parts) {
    std::vector<KeyDef> out;
    for (const auto* p : parts) out.insert(out.end(), p->begin(), p->end());
    return out;
}

std::string flag_name(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

/// One subcommand: its accepted keys bound to CLI11 options.
struct Command {
    CLI::App* app = nullptr;
    std::vector<KeyDef> keys;
    std::map<std::string, std::string> scalars;
    std::map<std::string, std::vector<std::string>> lists;
    std::map<std::string, CLI::Option*> options;
    std::string config;

    void bind(CLI::App* sub, std::vector<KeyDef> defs) {
        app = sub;
        keys = std::move(defs);
        sub->add_option("--config", config, "YAML config file; flags override its values");
        for (const auto& k : keys) {
            if (k.list) {
                options[k.name] = sub->add_option(flag_name(k.name), lists[k.name], k.help)->delimiter(',');
            } else {
                options[k.name] = sub->add_option(flag_name(k.name), scalars[k.name], k.help);
            }
        }
    }

    std::set<std::string> allowed() const {
        std::set<std::string> out;
        for (const auto& k : keys) out.insert(k.name);
        return out;
    }

    ParamSet params() const {
        ParamSet ps;
        if (!config.empty()) ps = load_config_file(config, allowed());
        for (const auto& k : keys) {
            if (options.at(k.name)->count() == 0) continue;
            if (k.list) {
                ps.set_list(k.name, lists.at(k.name));
            } else {
                ps.set(k.name, scalars.at(k.name));
            }
        }
        return ps;
    }
};

Cell str(std::string_view s) { return Cell{std::string(s)}; }
Cell count(std::uint64_t v) { return Cell{static_cast<std::int64_t>(v)}; }

void emit(const Table& table, const ParamSet& ps, std::ostream& out) {
    const int precision = ps.has("precision") ? static_cast<int>(ps.get_int("precision")) : 6;
    if (precision < 1 || precision > 17) throw InvalidParameter("precision must be in 1..17");
    if (ps.has("output")) {
        const std::filesystem::path path = ps.get_string("output");
        const TableFormat fmt = ps.has("format") ? parse_table_format(ps.get_string("format")) : format_for_path(path);
        std::ofstream file(path, std::ios::binary);
        if (!file) throw Error("cannot open output file '" + path.string() + "'");
        write_table(table, file, fmt, precision);
        return;
    }
    const TableFormat fmt = ps.has("format") ? parse_table_format(ps.get_string("format")) : TableFormat::text;
    write_table(table, out, fmt, precision);
}

void set_workers(const ParamSet& ps) {
    if (!ps.has("workers")) return;
    const auto w = ps.get_int("workers");
    if (w < 1) throw InvalidParameter("workers must be >= 1");
    omp_set_num_threads(static_cast<int>(w));
}

ChannelRates rates_of(const ParamSet& ps) { return ChannelRates(ps.get_double("r_ul"), ps.get_double("r_dl")); }

std::size_t items_of(const ParamSet& ps) {
    const auto s = ps.get_int("items");
    if (s < 1) throw InvalidParameter("items must be >= 1");
    return static_cast<std::size_t>(s);
}

bool has_load(const ParamSet& ps) { return ps.has("lambda_total") || ps.has("lambda_list"); }

void require_load(const ParamSet& ps, const std::string& what) {
    if (!has_load(ps)) throw InvalidParameter(what + " needs 'lambda_total' or 'lambda_list'");
}

/// Resolves beta = opt for the conventional scheme, then builds the scheme.
SchemeParams scheme_of(ParamSet ps, const Scenario& sc) {
    if (ps.has("beta") && ps.get_string("beta") == "opt") {
        if (parse_scheme_kind(ps.get_string("scheme")) != SchemeKind::conventional) {
            throw InvalidParameter("beta 'opt' applies to the conventional scheme only");
        }
        std::ostringstream os;
        os.precision(17);
        os << analytic::conv_opt_beta(sc.rates(), sc.total_lambda());
        ps.set("beta", os.str());
    }
    return scheme_from_params(ps, sc.item_count());
}

/// Update ratio from the request split, so it is defined without a load.
double split_update_ratio(const Scenario& sc, const std::vector<double>& p) {
    const auto prob = sc.request_prob();
    return std::inner_product(prob.begin(), prob.end(), p.begin(), 0.0);
}

// ---- analytic ----

Table run_analytic(const ParamSet& ps) {
    const std::string metric = ps.get_string("metric");

    if (metric == "rates") {
        RadioParams radio{ps.get_double("bandwidth"), ps.get_double("content_size"), ps.get_double("sinr_ul"),
                          ps.get_double("sinr_dl")};
        const ChannelRates r = rates_from_radio(radio);
        Table t({"r_ul", "r_dl"});
        t.add_row({r.r_ul(), r.r_dl()});
        return t;
    }
    if (metric == "popularity") {
        const auto w = popularity_weights(popularity_from_params(ps), items_of(ps));
        Table t({"rank", "request_prob"});
        for (std::size_t i = 0; i < w.size(); ++i) t.add_row({count(i + 1), w[i]});
        return t;
    }

    const ChannelRates rates = rates_of(ps);
    if (metric == "min-latency" || metric == "opt-beta") {
        const double lambda = ps.get_double("lambda_total");
        Table t({"beta", "min_latency", "aoi"});
        t.add_row({analytic::conv_opt_beta(rates, lambda), analytic::conv_min_latency(rates, lambda),
                   analytic::conv_aoi(rates, lambda)});
        return t;
    }
    if (metric == "threshold") {
        const std::size_t s = items_of(ps);
        Table t({"threshold", "min_aoi"});
        t.add_row({analytic::rsuc_tradeoff_threshold(rates, s), optimize::theorem4_min_aoi(rates, s)});
        return t;
    }

    const Scenario sc = scenario_from_params_load_optional(ps);
    const double lambda = sc.total_lambda();
    const SchemeParams scheme = scheme_of(ps, sc);
    const SchemeKind kind = scheme_kind(scheme);

    auto latency = [&]() -> double {
        require_load(ps, "metric latency");
        switch (kind) {
            case SchemeKind::conventional:
                return analytic::conv_latency(rates, lambda, std::get<Conventional>(scheme).beta);
            case SchemeKind::rsuc:
                return analytic::rsuc_latency(rates, lambda, std::get<Rsuc>(scheme).beta);
            case SchemeKind::rea:
                break;
        }
        return analytic::rea_latency(rates, lambda, update_ratio(sc, std::get<Rea>(scheme).update_prob));
    };
    auto aoi = [&]() -> double {
        switch (kind) {
            case SchemeKind::conventional:
                require_load(ps, "conventional aoi");
                return analytic::conv_aoi_at(rates, lambda, std::get<Conventional>(scheme).beta);
            case SchemeKind::rsuc:
                return analytic::rsuc_aoi(rates, sc.item_count(), std::get<Rsuc>(scheme).beta);
            case SchemeKind::rea:
                break;
        }
        require_load(ps, "ReA aoi");
        return analytic::rea_aoi_avg(rates, sc, std::get<Rea>(scheme).update_prob);
    };
    auto capacity = [&]() -> double {
        switch (kind) {
            case SchemeKind::conventional:
                return analytic::conv_capacity(rates);
            case SchemeKind::rsuc:
                return (1.0 - std::get<Rsuc>(scheme).beta) * rates.r_dl();
            case SchemeKind::rea:
                break;
        }
        return analytic::rea_capacity(rates, split_update_ratio(sc, std::get<Rea>(scheme).update_prob));
    };

    if (metric == "latency") {
        Table t({"scheme", "latency"});
        t.add_row({str(scheme_name(kind)), latency()});
        return t;
    }
    if (metric == "aoi") {
        Table t({"scheme", "aoi"});
        t.add_row({str(scheme_name(kind)), aoi()});
        return t;
    }
    if (metric == "capacity") {
        Table t({"scheme", "capacity"});
        t.add_row({str(scheme_name(kind)), capacity()});
        return t;
    }
    if (metric == "all") {
        Table t({"scheme", "latency", "aoi", "capacity"});
        t.add_row({str(scheme_name(kind)), latency(), aoi(), capacity()});
        return t;
    }
    if (metric == "moments" || metric == "item-aoi") {
        if (kind != SchemeKind::rea) throw InvalidParameter("metric " + metric + " needs scheme rea");
        const auto& p = std::get<Rea>(scheme).update_prob;
        if (metric == "moments") {
            const auto m = analytic::rea_service_moments(rates, split_update_ratio(sc, p));
            Table t({"update_ratio", "mean_x", "mean_x2"});
            t.add_row({m.update_ratio, m.mean_x, m.mean_x2});
            return t;
        }
        require_load(ps, "metric item-aoi");
        Table t({"rank", "lambda", "p", "aoi", "aoi_argmin_p"});
        for (std::size_t i = 0; i < sc.item_count(); ++i) {
            const double l = sc.lambda(i);
            t.add_row({count(i + 1), l, p[i], l > 0.0 ? Cell{analytic::rea_aoi_item(rates, l, p[i])} : Cell{},
                       l > 0.0 ? Cell{analytic::rea_aoi_item_argmin(rates, l)} : Cell{}});
        }
        return t;
    }
    throw InvalidParameter("metric: unknown value '" + metric + "'");
}

// ---- optimize ----

Table run_optimize(const ParamSet& ps) {
    const std::string problem = ps.get_string("problem");
    const ChannelRates rates = rates_of(ps);

    if (problem == "p1") {
        const double lambda = ps.get_double("lambda_total");
        const double beta = optimize::p1_opt_beta(rates, lambda);
        Table t({"beta", "latency", "aoi"});
        t.add_row({beta, analytic::conv_latency(rates, lambda, beta), analytic::conv_aoi_at(rates, lambda, beta)});
        return t;
    }
    if (problem == "p2") {
        const double lambda = ps.get_double("lambda_total");
        const std::size_t s = items_of(ps);
        optimize::P2Config cfg;
        if (ps.has("weight_aoi")) cfg.weight_aoi = ps.get_double("weight_aoi");
        const auto sol = optimize::p2_solve(rates, lambda, s, cfg);
        Table t({"weight_aoi", "beta", "residual", "iterations", "boundary", "latency", "aoi"});
        t.add_row({cfg.weight_aoi, sol.beta, sol.residual, count(sol.iterations), count(sol.boundary),
                   analytic::rsuc_latency(rates, lambda, sol.beta), analytic::rsuc_aoi(rates, s, sol.beta)});
        return t;
    }
    if (problem == "p3") {
        const double lambda = ps.get_double("lambda_total");
        const std::size_t s = items_of(ps);
        const double beta = optimize::p3_min_beta(rates, lambda, s, ps.get_double("aoi_cap"));
        Table t({"beta", "latency", "aoi", "capacity"});
        t.add_row({beta, analytic::rsuc_latency(rates, lambda, beta), analytic::rsuc_aoi(rates, s, beta),
                   (1.0 - beta) * rates.r_dl()});
        return t;
    }
    if (problem == "min-aoi") {
        const std::size_t s = items_of(ps);
        Table t({"min_aoi", "beta"});
        t.add_row({optimize::theorem4_min_aoi(rates, s), optimize::theorem4_beta(rates, s)});
        return t;
    }
    if (problem == "capacity-at-aoi") {
        const std::size_t s = items_of(ps);
        const double cap = ps.get_double("aoi_cap");
        Table t({"scheme", "status", "capacity", "beta", "update_ratio"});
        try {
            t.add_row({str("rsuc"), str("ok"), optimize::rsuc_capacity_at_aoi(rates, s, cap),
                       optimize::rsuc_min_beta_for_aoi(rates, s, cap), Cell{}});
        } catch (const Infeasible&) {
            t.add_row({str("rsuc"), str("infeasible"), Cell{}, Cell{}, Cell{}});
        }
        const Popularity pop = popularity_from_params(ps);
        const double c = experiments::rea_capacity_at_aoi(rates, s, pop, cap);
        if (c > 0.0) {
            const auto sol = optimize::p4_solve(Scenario::from_popularity(rates, s, c, pop), cap);
            t.add_row({str("rea"), str("ok"), c, Cell{}, sol.update_ratio});
        } else {
            t.add_row({str("rea"), str("infeasible"), Cell{}, Cell{}, Cell{}});
        }
        return t;
    }
    if (problem == "p4") {
        const Scenario sc = scenario_from_params(ps);
        const auto sol = optimize::p4_solve(sc, ps.get_double("aoi_cap"));
        Table t({"rank", "lambda", "p", "clamped", "aoi", "update_ratio", "y", "multiplier", "iterations",
                 "constraint_residual"});
        for (std::size_t i = 0; i < sc.item_count(); ++i) {
            const bool clamped = std::find(sol.clamped.begin(), sol.clamped.end(), i) != sol.clamped.end();
            t.add_row({count(i + 1), sc.lambda(i), sol.p[i], count(clamped),
                       analytic::rea_aoi_item(rates, sc.lambda(i), sol.p[i]), sol.update_ratio, sol.y,
                       sol.multiplier, count(sol.iterations), sol.constraint_residual});
        }
        return t;
    }
    throw InvalidParameter("problem: unknown value '" + problem + "'");
}

// ---- simulate / sweep shared ----

experiments::SimOptions sim_options(const ParamSet& ps) {
    experiments::SimOptions o;
    if (ps.has("seed")) o.seed = ps.get_uint("seed");
    if (ps.has("replications")) {
        const auto r = ps.get_int("replications");
        if (r < 1) throw InvalidParameter("replications must be >= 1");
        o.replications = static_cast<unsigned>(r);
    }
    if (ps.has("warmup") && ps.has("warmup_time")) throw InvalidParameter("give either warmup or warmup_time");
    if (ps.has("warmup")) o.warmup = {desim::Warmup::Kind::fraction, ps.get_double("warmup")};
    if (ps.has("warmup_time")) o.warmup = {desim::Warmup::Kind::duration, ps.get_double("warmup_time")};
    if (ps.has("requests") && ps.has("duration")) throw InvalidParameter("give either requests or duration");
    if (ps.has("requests")) o.stop = {desim::StopRule::Kind::requests, static_cast<double>(ps.get_uint("requests"))};
    if (ps.has("duration")) o.stop = {desim::StopRule::Kind::duration, ps.get_double("duration")};
    if (ps.has("service")) {
        const std::string s = ps.get_string("service");
        if (s == "exponential") {
            o.service = desim::ServiceModel::exponential;
        } else if (s == "deterministic") {
            o.service = desim::ServiceModel::deterministic;
        } else {
            throw InvalidParameter("service must be exponential or deterministic (got '" + s + "')");
        }
    }
    if (ps.has("divergence_bound")) o.divergence_bound = ps.get_uint("divergence_bound");
    return o;
}

int run_simulate(const ParamSet& ps, std::ostream& out, std::ostream& err) {
    set_workers(ps);
    const Scenario sc = scenario_from_params(ps);
    const SchemeParams scheme = scheme_of(ps, sc);
    const desim::SimConfig cfg = experiments::make_sim_config(sc, scheme, sim_options(ps));
    desim::validate(cfg);

    std::unique_ptr<std::ofstream> records;
    desim::RecordSink sink;
    std::unique_ptr<desim::RecordCsvWriter> writer;
    if (ps.has("records")) {
        records = std::make_unique<std::ofstream>(ps.get_string("records"), std::ios::binary);
        if (!*records) throw Error("cannot open records file '" + ps.get_string("records") + "'");
        writer = std::make_unique<desim::RecordCsvWriter>(*records);
        sink = [w = writer.get()](const desim::DeliveryRecord& r) { (*w)(r); };
    }
    const desim::SimResult res = desim::simulate(cfg, sink);

    Table t({"scheme", "lambda_total", "latency", "latency_ci95", "aoi", "aoi_ci95", "n_delivered", "replications",
             "status"});
    t.add_row({str(scheme_name(scheme)), sc.total_lambda(), res.perf.mean_latency, res.perf.latency_ci95,
               res.perf.mean_aoi, res.perf.aoi_ci95, count(res.perf.n_delivered), count(cfg.replications),
               str(res.overloaded ? "overloaded" : "ok")});
    emit(t, ps, out);
    if (res.overloaded) {
        err << "error: " << res.diagnostic << '\n';
        return kOverload;
    }
    return kOk;
}

std::vector<std::size_t> sizes_of(const ParamSet& ps, const std::string& key) {
    std::vector<std::size_t> out;
    for (double v : ps.get_doubles(key)) {
        if (!(v >= 1.0) || v != std::floor(v)) throw InvalidParameter(key + ": values must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

int run_sweep(const ParamSet& ps, std::ostream& out, std::ostream& err) {
    set_workers(ps);
    experiments::SweepSpec spec;
    spec.family = experiments::parse_family(ps.get_string("family"));
    if (ps.has("r_ul") || ps.has("r_dl")) {
        spec.rates = ChannelRates(ps.has("r_ul") ? ps.get_double("r_ul") : spec.rates.r_ul(),
                                  ps.has("r_dl") ? ps.get_double("r_dl") : spec.rates.r_dl());
    }
    if (ps.has("items")) spec.items = items_of(ps);
    if (ps.has("lambda_total")) spec.lambda_total = ps.get_double("lambda_total");
    if (ps.has("popularity")) spec.popularity = popularity_from_params(ps);
    if (ps.has("grid")) spec.grid = ps.get_doubles("grid");
    if (ps.has("schemes")) {
        spec.schemes.clear();
        for (const auto& s : ps.get_strings("schemes")) spec.schemes.push_back(parse_scheme_kind(s));
    }
    if (ps.has("conv_beta")) spec.conv_betas = ps.get_doubles("conv_beta");
    if (ps.has("rsuc_beta")) spec.rsuc_betas = ps.get_doubles("rsuc_beta");
    if (ps.has("rea_p")) spec.rea_p = ps.get_doubles("rea_p");
    if (ps.has("simulate")) spec.simulate = ps.get_bool("simulate");
    if (ps.has("latency_tol")) spec.latency_tol = ps.get_double("latency_tol");
    if (ps.has("aoi_tol")) spec.aoi_tol = ps.get_double("aoi_tol");
    if (ps.has("rea_aoi_tol")) spec.rea_aoi_tol = ps.get_double("rea_aoi_tol");
    if (ps.has("item_grid")) spec.item_grid = sizes_of(ps, "item_grid");
    if (ps.has("theta_grid")) spec.theta_grid = ps.get_doubles("theta_grid");
    if (ps.has("rate_grid")) {
        for (const auto& pair : ps.get_strings("rate_grid")) {
            const auto colon = pair.find(':');
            if (colon == std::string::npos) throw InvalidParameter("rate_grid: expected UL:DL, got '" + pair + "'");
            try {
                spec.rate_grid.emplace_back(std::stod(pair.substr(0, colon)), std::stod(pair.substr(colon + 1)));
            } catch (const std::logic_error&) {
                throw InvalidParameter("rate_grid: expected UL:DL, got '" + pair + "'");
            }
        }
    }
    if (ps.has("per_item_cap")) spec.per_item_cap = ps.get_double("per_item_cap");
    if (ps.has("trace")) spec.trace = experiments::ArrivalTrace::load_csv(ps.get_string("trace"));
    if (ps.has("horizon")) spec.horizon = ps.get_double("horizon");
    if (spec.family == experiments::Family::trace && ps.has("conv_beta")) {
        if (spec.conv_betas.size() != 1) throw InvalidParameter("conv_beta: the trace family takes one value");
        spec.trace_conv_beta = spec.conv_betas.front();
    }
    if (ps.has("workers")) spec.workers = static_cast<std::size_t>(ps.get_int("workers"));
    spec.sim = sim_options(ps);
    spec.validate();

    if (spec.family == experiments::Family::scheme_compare) {
        const auto result = experiments::run_scheme_compare(spec);
        emit(experiments::scheme_compare_table(result), ps, out);
        const Table items = experiments::per_item_table(result);
        if (ps.has("per_item_output")) {
            write_table_file(items, ps.get_string("per_item_output"));
        } else if (!ps.has("output") && !ps.has("format")) {
            out << '\n';
            emit(items, ps, out);
        }
        for (const auto& note : result.notes) err << "note: " << note << '\n';
        return kOk;
    }
    emit(experiments::run_sweep(spec), ps, out);
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latency and freshness of cached content under three RSU service schemes", "aoicache"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "help for every subcommand");

    const auto with_output = [](std::vector<KeyDef> v) {
        v.insert(v.end(), kOutputKeys.begin(), kOutputKeys.end());
        return v;
    };
    Command analytic_cmd;
    Command simulate_cmd;
    Command optimize_cmd;
    Command sweep_cmd;
    analytic_cmd.bind(app.add_subcommand("analytic", "closed-form latency, AoI and capacity"),
                      with_output(concat({&kScenarioKeys, &kAnalyticKeys})));
    std::vector<KeyDef> sim_keys = concat({&kScenarioKeys, &kSimKeys});
    sim_keys.push_back({"records", "CSV file for the delivery records of replication 0"});
    simulate_cmd.bind(app.add_subcommand("simulate", "discrete-event simulation of one scheme"), with_output(sim_keys));
    optimize_cmd.bind(app.add_subcommand("optimize", "split and update-probability optimizers"),
                      with_output(concat({&kScenarioKeys, &kOptimizeKeys})));
    std::vector<KeyDef> sweep_keys = concat({&kSweepKeys, &kSimKeys});
    sweep_cmd.bind(app.add_subcommand("sweep", "experiment families"), with_output(sweep_keys));

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (analytic_cmd.app->parsed()) {
            const ParamSet ps = analytic_cmd.params();
            emit(run_analytic(ps), ps, out);
            return kOk;
        }
        if (optimize_cmd.app->parsed()) {
            const ParamSet ps = optimize_cmd.params();
            emit(run_optimize(ps), ps, out);
            return kOk;
        }
        if (simulate_cmd.app->parsed()) return run_simulate(simulate_cmd.params(), out, err);
        if (sweep_cmd.app->parsed()) return run_sweep(sweep_cmd.params(), out, err);
    } catch (const Infeasible& e) {
        err << "infeasible: " << e.what() << '\n';
        return kInfeasible;
    } catch (const Overload& e) {
        err << "overload: " << e.what() << '\n';
        return kOverload;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DegenerateSplit& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnboundedAoi& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace aoicache::cli
