#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpcover {

/// Bad key, bad value or unreadable config; the CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct KeyDef {
    std::string name;
    std::string default_value;
    std::string help;
    /// Keys that do not affect results (output location, thread count) stay out of the manifest.
    bool in_manifest = true;
};

/// Accepted keys and defaults of one subcommand.
struct Schema {
    std::string subcommand;
    std::vector<KeyDef> keys;

    [[nodiscard]] const KeyDef* find(const std::string& name) const;
};

/// Schema for "fit", "coverage", "asymptotic" or "rates". Throws ConfigError otherwise.
const Schema& schema_for(const std::string& subcommand);

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Throws ConfigError on a malformed line or a repeated key.
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Fully resolved key set of one run. Lookups of keys outside the schema throw.
class Config {
public:
    Config() = default;
    explicit Config(const Schema& schema);

    /// Overrides a key; unknown keys throw ConfigError naming the origin.
    void set(const std::string& key, const std::string& value, const std::string& origin);
    void merge(const std::map<std::string, std::string>& values, const std::string& origin);

    [[nodiscard]] const std::string& subcommand() const noexcept { return subcommand_; }
    [[nodiscard]] const std::string& str(const std::string& key) const;
    [[nodiscard]] double real(const std::string& key) const;
    [[nodiscard]] std::size_t count(const std::string& key) const;
    [[nodiscard]] std::uint64_t u64(const std::string& key) const;
    [[nodiscard]] std::vector<double> reals(const std::string& key) const;
    [[nodiscard]] std::vector<std::size_t> counts(const std::string& key) const;

    /// Manifest keys in schema order.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> manifest_entries() const;
    /// The manifest entries as config text that reproduces the run.
    [[nodiscard]] std::string manifest_text() const;

private:
    const Schema* schema_ = nullptr;
    std::string subcommand_;
    std::map<std::string, std::string> values_;
};

/// Shortest text that reads back to the same double.
std::string format_shortest(double value);

/// defaults < config file < environment (GPCOVER_SEED, GPCOVER_THREADS) < overrides.
Config resolve_config(const std::string& subcommand, const std::string& config_path,
                      const std::vector<std::pair<std::string, std::string>>& overrides);

}  // namespace gpcover
