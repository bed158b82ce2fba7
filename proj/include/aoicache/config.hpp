#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "aoicache/model.hpp"

namespace aoicache {

/// Flat key/value view of a config file or command line. Values are kept as
/// text and converted on access so that error messages can name the key.
/// List values hold one string per element; scalars hold exactly one.
class ParamSet {
public:
    void set(const std::string& key, std::string value);
    void set_list(const std::string& key, std::vector<std::string> values);
    /// Copies every key of `other` over this set (later wins).
    void merge_from(const ParamSet& other);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::set<std::string> keys() const;

    double get_double(const std::string& key) const;
    std::int64_t get_int(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    std::string get_string(const std::string& key) const;
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    std::optional<double> find_double(const std::string& key) const;

private:
    const std::vector<std::string>& raw(const std::string& key) const;

    std::map<std::string, std::vector<std::string>> values_;
};

/// Keys understood by scenario_from_params / scheme_from_params.
const std::set<std::string>& scenario_keys();

/// Parses YAML text into a ParamSet. The nested `scheme` block
/// ({type, beta, p}) is flattened to keys `scheme`, `beta`, `p`. Any key not in
/// `allowed` is rejected with InvalidParameter.
ParamSet parse_config_text(const std::string& text, const std::set<std::string>& allowed);
ParamSet load_config_file(const std::filesystem::path& path, const std::set<std::string>& allowed);

/// Requires r_ul, r_dl, items and exactly one of lambda_total (+ optional
/// popularity/theta/weights) or lambda_list.
Scenario scenario_from_params(const ParamSet& params);
/// Like scenario_from_params but lets the aggregate rate be absent, in which
/// case lambda_total = 0 is used. For metrics that do not depend on load.
Scenario scenario_from_params_load_optional(const ParamSet& params);
Popularity popularity_from_params(const ParamSet& params);

/// `scheme` is required. `beta` defaults to 0.5 for conventional/RSUC;
/// `p` is required for ReA and a single value is broadcast to every item.
SchemeParams scheme_from_params(const ParamSet& params, std::size_t item_count);

/// Inverse of scenario_from_params/scheme_from_params (explicit lambda_list
/// form). The output parses back to an equal scenario and scheme.
std::string to_config_text(const Scenario& scenario, const SchemeParams& scheme);

}  // namespace aoicache
