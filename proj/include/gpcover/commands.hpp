#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gpcover/config.hpp"
#include "gpcover/simharness.hpp"

namespace gpcover {

inline constexpr const char* kToolVersion = "0.1.0";

/// Writes RFC-4180 rows (CRLF line ends) with numbers at 17 significant digits.
/// A leading "# manifest: {...}" line carries the run manifest.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::string& manifest_json);

    void header(const std::vector<std::string>& names);
    /// Empty optional cells are written for NaN values.
    void row(std::span<const double> values);

    static std::string quote(const std::string& field);
    static std::string number(double v);

private:
    std::ostream& out_;
};

/// Compact JSON of the manifest: tool, version, subcommand, seed and resolved config.
std::string manifest_json(const Config& config);

LambdaChoice lambda_from_config(const Config& config);
/// Reads a CSV with a header containing columns x and y. Throws ConfigError when unreadable.
Dataset read_dataset_csv(const std::string& path);

/// Each command writes its files into output.dir. Invalid settings throw
/// ConfigError or std::invalid_argument, failed factorizations NumericalError.
void cmd_fit(const Config& config);
void cmd_coverage(const Config& config);
void cmd_asymptotic(const Config& config, std::ostream& out);
void cmd_rates(const Config& config);

}  // namespace gpcover
