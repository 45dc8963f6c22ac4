#include "gpcover/config.hpp"

#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gpcover/simharness.hpp"

namespace gpcover {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_real(const std::string& key, const std::string& text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) throw ConfigError("key '" + key + "': '" + text + "' is not a number");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end)
        throw ConfigError("key '" + key + "': '" + text + "' is not a nonnegative integer");
    return v;
}

std::vector<KeyDef> common_keys() {
    return {
        {"seed", "20190101", "base seed for all randomness"},
        {"threads", "0", "worker threads, 0 = all cores", false},
        {"output.dir", ".", "directory for output files", false},
    };
}

std::vector<KeyDef> lambda_keys() {
    const LambdaChoice d;
    return {
        {"lambda.rule", to_string(d.rule), "rate, power, explicit, class or matched"},
        {"lambda.value", format_shortest(d.value), "lambda for rule=explicit"},
        {"lambda.scale", format_shortest(d.scale), "c in c n^{-p} for rule=power, multiplier for rule=matched"},
        {"lambda.exponent", format_shortest(d.exponent), "p in c n^{-p} for rule=power"},
        {"lambda.class", "holder", "smoothness class for rule=class: sobolev or holder"},
        {"lambda.B", format_shortest(d.class_B), "class radius B for rule=class"},
    };
}

Schema make_schema(std::string name, std::vector<KeyDef> specific, bool with_lambda) {
    Schema s{std::move(name), common_keys()};
    if (with_lambda) {
        auto lk = lambda_keys();
        s.keys.insert(s.keys.end(), lk.begin(), lk.end());
    }
    s.keys.insert(s.keys.end(), specific.begin(), specific.end());
    return s;
}

const std::vector<Schema>& schemas() {
    static const std::vector<Schema> all = [] {
        const SimConfig sim;
        const RateConfig rate;
        std::vector<Schema> v;
        v.push_back(make_schema("fit",
                                {
                                    {"data.source", "synthetic", "synthetic or file"},
                                    {"data.file", "", "CSV with header x,y for data.source=file"},
                                    {"data.n", "200", "sample size for synthetic data"},
                                    {"data.sigma", format_shortest(sim.sigma), "noise standard deviation"},
                                    {"kernel.nu", "0.6", "Matern smoothness"},
                                    {"grid.size", std::to_string(sim.grid_size), "equispaced test points on [0,1]"},
                                    {"band.draws", std::to_string(sim.draws), "posterior draws for the band radius"},
                                    {"fit.level", "0.95", "credible level of intervals and band"},
                                },
                                true));
        v.push_back(make_schema("coverage",
                                {
                                    {"coverage.n", "200,500", "sample sizes"},
                                    {"coverage.nu", "0.1,0.15,1.2", "Matern smoothness values"},
                                    {"coverage.levels", "0.8,0.9", "credible levels"},
                                    {"coverage.replicates", std::to_string(sim.replicates), "datasets per cell"},
                                    {"data.sigma", format_shortest(sim.sigma), "noise standard deviation"},
                                    {"grid.size", std::to_string(sim.grid_size), "equispaced test points on [0,1]"},
                                    {"band.draws", std::to_string(sim.draws), "posterior draws per band radius"},
                                    {"theory.draws", std::to_string(sim.theory_draws),
                                     "draws for the population band limit, 0 skips it"},
                                },
                                true));
        v.push_back(make_schema("asymptotic",
                                {
                                    {"asymptotic.alpha", "2", "prior smoothness alpha > 1/2"},
                                    {"asymptotic.level", "0.95", "credible level"},
                                    {"asymptotic.h", "0.1,0.01,0.001", "bandwidths for the finite-h C_IR"},
                                },
                                false));
        std::string ns;
        for (std::size_t n : rate.ns) ns += (ns.empty() ? "" : ",") + std::to_string(n);
        v.push_back(make_schema("rates",
                                {
                                    {"rates.n", ns, "sample sizes, at least 4 distinct"},
                                    {"rates.alpha", format_shortest(rate.alpha), "smoothness alpha, kernel nu = alpha - 1/2"},
                                    {"rates.class", "holder", "sobolev or holder bandwidth"},
                                    {"rates.truth", "holder", "holder test function or the series f* used for coverage"},
                                    {"rates.seeds", std::to_string(rate.seeds), "datasets per sample size"},
                                    {"data.sigma", format_shortest(rate.sigma), "noise standard deviation"},
                                    {"grid.size", std::to_string(rate.grid_size), "equispaced test points on [0,1]"},
                                },
                                false));
        return v;
    }();
    return all;
}

}  // namespace

std::string format_shortest(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

const KeyDef* Schema::find(const std::string& name) const {
    for (const KeyDef& k : keys)
        if (k.name == name) return &k;
    return nullptr;
}

const Schema& schema_for(const std::string& subcommand) {
    for (const Schema& s : schemas())
        if (s.subcommand == subcommand) return s;
    throw ConfigError("unknown subcommand '" + subcommand + "'");
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::stringstream in(text);
    std::string line;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(lineno);
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError(where + ": empty key");
        if (!out.emplace(key, trim(line.substr(eq + 1))).second)
            throw ConfigError(where + ": key '" + key + "' given twice");
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

Config::Config(const Schema& schema) : schema_(&schema), subcommand_(schema.subcommand) {
    for (const KeyDef& k : schema.keys) values_[k.name] = k.default_value;
}

void Config::set(const std::string& key, const std::string& value, const std::string& origin) {
    if (!schema_->find(key))
        throw ConfigError(origin + ": unknown key '" + key + "' for subcommand " + subcommand_);
    values_[key] = value;
}

void Config::merge(const std::map<std::string, std::string>& values, const std::string& origin) {
    for (const auto& [k, v] : values) set(k, v, origin);
}

const std::string& Config::str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("key '" + key + "' is not defined for " + subcommand_);
    return it->second;
}

double Config::real(const std::string& key) const { return parse_real(key, str(key)); }

std::size_t Config::count(const std::string& key) const { return static_cast<std::size_t>(parse_u64(key, str(key))); }

std::uint64_t Config::u64(const std::string& key) const { return parse_u64(key, str(key)); }

std::vector<double> Config::reals(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split_list(str(key))) out.push_back(parse_real(key, item));
    return out;
}

std::vector<std::size_t> Config::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const std::string& item : split_list(str(key))) out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
    return out;
}

std::vector<std::pair<std::string, std::string>> Config::manifest_entries() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const KeyDef& k : schema_->keys)
        if (k.in_manifest) out.emplace_back(k.name, values_.at(k.name));
    return out;
}

std::string Config::manifest_text() const {
    std::string out = "# gpcover " + subcommand_ + "\n";
    for (const auto& [k, v] : manifest_entries()) out += k + " = " + v + "\n";
    return out;
}

Config resolve_config(const std::string& subcommand, const std::string& config_path,
                      const std::vector<std::pair<std::string, std::string>>& overrides) {
    Config config(schema_for(subcommand));
    if (!config_path.empty()) config.merge(read_config_file(config_path), config_path);
    if (const char* seed = std::getenv("GPCOVER_SEED")) config.set("seed", seed, "GPCOVER_SEED");
    if (const char* threads = std::getenv("GPCOVER_THREADS")) config.set("threads", threads, "GPCOVER_THREADS");
    for (const auto& [k, v] : overrides) config.set(k, v, "command line");
    return config;
}

}  // namespace gpcover
