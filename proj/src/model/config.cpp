#include "aoicache/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "aoicache/errors.hpp"

namespace aoicache {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& text, const char* expected) {
    throw InvalidParameter("config key '" + key + "': expected " + expected + ", got '" + text + "'");
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) bad_value(key, text, "a number");
    return value;
}

void flatten_scalar_or_list(const std::string& key, const YAML::Node& node, ParamSet& out) {
    if (node.IsScalar()) {
        out.set(key, node.Scalar());
    } else if (node.IsSequence()) {
        std::vector<std::string> items;
        for (const auto& item : node) {
            if (!item.IsScalar()) throw InvalidParameter("config key '" + key + "': nested lists are not allowed");
            items.push_back(item.Scalar());
        }
        out.set_list(key, std::move(items));
    } else if (node.IsNull()) {
        throw InvalidParameter("config key '" + key + "' has no value");
    } else {
        throw InvalidParameter("config key '" + key + "' must be a scalar or a list");
    }
}

}  // namespace

void ParamSet::set(const std::string& key, std::string value) { values_[key] = {std::move(value)}; }

void ParamSet::set_list(const std::string& key, std::vector<std::string> values) {
    values_[key] = std::move(values);
}

void ParamSet::merge_from(const ParamSet& other) {
    for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::set<std::string> ParamSet::keys() const {
    std::set<std::string> out;
    for (const auto& [k, v] : values_) out.insert(k);
    return out;
}

const std::vector<std::string>& ParamSet::raw(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw InvalidParameter("missing required parameter '" + key + "'");
    return it->second;
}

double ParamSet::get_double(const std::string& key) const {
    const auto& v = raw(key);
    if (v.size() != 1) throw InvalidParameter("config key '" + key + "' must be a single number");
    return parse_double(key, v.front());
}

std::int64_t ParamSet::get_int(const std::string& key) const {
    const auto& v = raw(key);
    if (v.size() != 1) throw InvalidParameter("config key '" + key + "' must be a single integer");
    // Accept 1e6-style integers since counts are often written that way.
    const double d = parse_double(key, v.front());
    if (d != std::floor(d) || std::fabs(d) > 9.0e18) bad_value(key, v.front(), "an integer");
    return static_cast<std::int64_t>(d);
}

std::uint64_t ParamSet::get_uint(const std::string& key) const {
    const auto& v = raw(key);
    if (v.size() != 1) throw InvalidParameter("config key '" + key + "' must be a single integer");
    const std::string& text = v.front();
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec == std::errc() && ptr == text.data() + text.size()) return value;
    const std::int64_t i = get_int(key);
    if (i < 0) bad_value(key, text, "a non-negative integer");
    return static_cast<std::uint64_t>(i);
}

bool ParamSet::get_bool(const std::string& key) const {
    const std::string s = get_string(key);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    bad_value(key, s, "a boolean");
}

std::string ParamSet::get_string(const std::string& key) const {
    const auto& v = raw(key);
    if (v.size() != 1) throw InvalidParameter("config key '" + key + "' must be a single value");
    return v.front();
}

std::vector<double> ParamSet::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (const auto& text : raw(key)) out.push_back(parse_double(key, text));
    return out;
}

std::vector<std::string> ParamSet::get_strings(const std::string& key) const { return raw(key); }

std::optional<double> ParamSet::find_double(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return get_double(key);
}

const std::set<std::string>& scenario_keys() {
    static const std::set<std::string> keys = {"r_ul",  "r_dl",    "items", "lambda_total", "popularity",
                                               "theta", "weights", "lambda_list", "scheme", "beta", "p"};
    return keys;
}

ParamSet parse_config_text(const std::string& text, const std::set<std::string>& allowed) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw InvalidParameter(std::string("config parse error: ") + e.what());
    }
    ParamSet out;
    if (root.IsNull()) return out;
    if (!root.IsMap()) throw InvalidParameter("config must be a key/value mapping");

    for (const auto& entry : root) {
        const std::string key = entry.first.as<std::string>();
        if (!allowed.count(key)) throw InvalidParameter("unknown config key '" + key + "'");
        const YAML::Node& value = entry.second;
        if (key == "scheme" && value.IsMap()) {
            for (const auto& sub : value) {
                const std::string sub_key = sub.first.as<std::string>();
                if (sub_key == "type") {
                    flatten_scalar_or_list("scheme", sub.second, out);
                } else if (sub_key == "beta" || sub_key == "p") {
                    flatten_scalar_or_list(sub_key, sub.second, out);
                } else {
                    throw InvalidParameter("unknown key '" + sub_key + "' in scheme block");
                }
            }
            continue;
        }
        flatten_scalar_or_list(key, value, out);
    }
    return out;
}

ParamSet load_config_file(const std::filesystem::path& path, const std::set<std::string>& allowed) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open config file '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), allowed);
}

Popularity popularity_from_params(const ParamSet& params) {
    const std::string kind = params.has("popularity") ? params.get_string("popularity") : "uniform";
    if (kind == "uniform") return Popularity::uniform();
    if (kind == "zipf") {
        if (!params.has("theta")) throw InvalidParameter("popularity 'zipf' requires 'theta'");
        return Popularity::zipf(params.get_double("theta"));
    }
    if (kind == "explicit") {
        if (!params.has("weights")) throw InvalidParameter("popularity 'explicit' requires 'weights'");
        return Popularity::explicit_weights(params.get_doubles("weights"));
    }
    throw InvalidParameter("popularity must be uniform, zipf or explicit (got '" + kind + "')");
}

namespace {

Scenario scenario_impl(const ParamSet& params, bool load_required) {
    const ChannelRates rates(params.get_double("r_ul"), params.get_double("r_dl"));
    const bool has_total = params.has("lambda_total");
    const bool has_list = params.has("lambda_list");
    if (has_total && has_list) {
        throw InvalidParameter("give either lambda_total (with popularity) or lambda_list, not both");
    }
    if (has_list) {
        auto list = params.get_doubles("lambda_list");
        if (params.has("items") && static_cast<std::size_t>(params.get_int("items")) != list.size()) {
            throw InvalidParameter("lambda_list length does not match items");
        }
        return Scenario::from_rates(rates, std::move(list));
    }
    const std::int64_t items = params.get_int("items");
    if (items < 1) throw InvalidParameter("items must be >= 1");
    if (!has_total && load_required) {
        throw InvalidParameter("missing required parameter 'lambda_total' (or 'lambda_list')");
    }
    const double total = has_total ? params.get_double("lambda_total") : 0.0;
    return Scenario::from_popularity(rates, static_cast<std::size_t>(items), total, popularity_from_params(params));
}

}  // namespace

Scenario scenario_from_params(const ParamSet& params) { return scenario_impl(params, true); }

Scenario scenario_from_params_load_optional(const ParamSet& params) { return scenario_impl(params, false); }

SchemeParams scheme_from_params(const ParamSet& params, std::size_t item_count) {
    const SchemeKind kind = parse_scheme_kind(params.get_string("scheme"));
    SchemeParams out;
    switch (kind) {
        case SchemeKind::conventional:
            out = Conventional{params.has("beta") ? params.get_double("beta") : 0.5};
            break;
        case SchemeKind::rsuc:
            out = Rsuc{params.has("beta") ? params.get_double("beta") : 0.5};
            break;
        case SchemeKind::rea: {
            if (!params.has("p")) throw InvalidParameter("scheme 'rea' requires 'p'");
            auto p = params.get_doubles("p");
            if (p.size() == 1 && item_count > 1) p.assign(item_count, p.front());
            out = Rea{std::move(p)};
            break;
        }
    }
    validate_scheme(out, item_count);
    return out;
}

std::string to_config_text(const Scenario& scenario, const SchemeParams& scheme) {
    YAML::Emitter em;
    em.SetDoublePrecision(17);
    em << YAML::BeginMap;
    em << YAML::Key << "r_ul" << YAML::Value << scenario.rates().r_ul();
    em << YAML::Key << "r_dl" << YAML::Value << scenario.rates().r_dl();
    em << YAML::Key << "items" << YAML::Value << scenario.item_count();
    em << YAML::Key << "lambda_list" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (double l : scenario.lambda()) em << l;
    em << YAML::EndSeq;
    em << YAML::Key << "scheme" << YAML::Value << YAML::BeginMap;
    em << YAML::Key << "type" << YAML::Value << std::string(scheme_name(scheme));
    if (const auto* c = std::get_if<Conventional>(&scheme)) {
        em << YAML::Key << "beta" << YAML::Value << c->beta;
    } else if (const auto* r = std::get_if<Rsuc>(&scheme)) {
        em << YAML::Key << "beta" << YAML::Value << r->beta;
    } else {
        em << YAML::Key << "p" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double p : std::get<Rea>(scheme).update_prob) em << p;
        em << YAML::EndSeq;
    }
    em << YAML::EndMap;
    em << YAML::EndMap;
    return std::string(em.c_str()) + "\n";
}

}  // namespace aoicache
