#include "gpcover/commands.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "gpcover/credible.hpp"
#include "gpcover/normal.hpp"
#include "gpcover/random.hpp"
#include "gpcover/spectral.hpp"
#include "gpcover/true_function.hpp"

namespace gpcover {

namespace {

using nlohmann::ordered_json;

ordered_json manifest_object(const Config& config) {
    ordered_json m;
    m["tool"] = "gpcover";
    m["version"] = kToolVersion;
    m["subcommand"] = config.subcommand();
    m["seed"] = config.u64("seed");
    ordered_json c = ordered_json::object();
    for (const auto& [k, v] : config.manifest_entries()) c[k] = v;
    m["config"] = c;
    return m;
}

std::filesystem::path output_dir(const Config& config) {
    std::filesystem::path dir(config.str("output.dir"));
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    return dir;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    return out;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
    auto out = open_output(path);
    out << j.dump(2) << '\n';
}

void write_manifest_cfg(const std::filesystem::path& dir, const Config& config) {
    auto out = open_output(dir / "manifest.cfg");
    out << config.manifest_text();
}

SmoothnessClass class_from_string(const std::string& key, const std::string& name) {
    if (name == "sobolev") return SmoothnessClass::Sobolev;
    if (name == "holder") return SmoothnessClass::Holder;
    throw ConfigError("key '" + key + "': expected sobolev or holder, got '" + name + "'");
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, const std::string& manifest_json) : out_(out) {
    out_ << "# manifest: " << manifest_json << "\r\n";
}

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << quote(names[i]);
    out_ << "\r\n";
}

void CsvWriter::row(std::span<const double> values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << number(values[i]);
    out_ << "\r\n";
}

std::string CsvWriter::quote(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string CsvWriter::number(double v) {
    if (std::isnan(v)) return {};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string manifest_json(const Config& config) { return manifest_object(config).dump(); }

LambdaChoice lambda_from_config(const Config& config) {
    LambdaChoice c;
    try {
        c.rule = lambda_rule_from_string(config.str("lambda.rule"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("key 'lambda.rule': ") + e.what());
    }
    c.value = config.real("lambda.value");
    c.scale = config.real("lambda.scale");
    c.exponent = config.real("lambda.exponent");
    c.class_B = config.real("lambda.B");
    c.smoothness_class = class_from_string("lambda.class", config.str("lambda.class"));
    return c;
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read data file '" + path + "'");
    auto split = [](const std::string& line) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
            while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
            cells.push_back(cell);
        }
        return cells;
    };
    std::string line;
    while (std::getline(in, line) && (line.empty() || line[0] == '#')) {
    }
    const auto names = split(line);
    std::size_t ix = names.size();
    std::size_t iy = names.size();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "x") ix = i;
        if (names[i] == "y") iy = i;
    }
    if (ix == names.size() || iy == names.size())
        throw ConfigError("data file '" + path + "' needs a header with columns x and y");
    Dataset d;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        const auto cells = split(line);
        try {
            if (cells.size() <= std::max(ix, iy)) throw std::invalid_argument("short row");
            std::size_t used = 0;
            const double x = std::stod(cells[ix], &used);
            if (used != cells[ix].size()) throw std::invalid_argument("x");
            const double y = std::stod(cells[iy], &used);
            if (used != cells[iy].size()) throw std::invalid_argument("y");
            d.x.push_back(x);
            d.y.push_back(y);
        } catch (const std::exception&) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed row");
        }
    }
    try {
        d.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError("data file '" + path + "': " + e.what());
    }
    return d;
}

void cmd_fit(const Config& config) {
    const std::uint64_t seed = config.u64("seed");
    const double nu = config.real("kernel.nu");
    const double sigma = config.real("data.sigma");
    const double level = config.real("fit.level");
    if (!(sigma >= 0.0)) throw ConfigError("key 'data.sigma' must be nonnegative");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("key 'fit.level' must lie in (0,1)");
    const KernelSpec kernel = KernelSpec::matern(nu);

    const std::string source = config.str("data.source");
    const bool synthetic = source == "synthetic";
    Dataset data;
    if (synthetic) {
        data = generate_data(config.count("data.n"), sigma, derive_seed(seed, 0, 0));
    } else if (source == "file") {
        data = read_dataset_csv(config.str("data.file"));
    } else {
        throw ConfigError("key 'data.source': expected synthetic or file, got '" + source + "'");
    }

    const double alpha = nu + 0.5;
    const double lambda = lambda_from_config(config).resolve(data.size(), alpha, sigma);
    const PosteriorGP post = fit(data, kernel, lambda, std::max(sigma * sigma, kMinNoiseVariance));
    const std::vector<double> grid = equispaced_grid(config.count("grid.size"));
    const GridPosterior gp = grid_posterior(post, grid);
    const std::size_t draws = config.count("band.draws");
    const CredibleBand band = credible_band(gp, level, draws, derive_seed(seed, 0, 1));
    const std::vector<double> truth = TrueFunction::shared()(grid);

    const std::filesystem::path dir = output_dir(config);
    const std::string manifest = manifest_json(config);
    {
        auto out = open_output(dir / "fit_grid.csv");
        CsvWriter csv(out, manifest);
        csv.header({"x", "mean", "sd", "ci_lo", "ci_hi", "band_radius"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double var = std::max(gp.cov(ii, ii) - gp.jitter, 0.0);
            const PointwiseInterval ci = pointwise_interval(gp.mean(ii), var, level);
            const double row[] = {grid[i], gp.mean(ii), std::sqrt(var), ci.lower(), ci.upper(), band.radius};
            csv.row(row);
        }
    }
    double sup_error = 0.0;
    {
        auto out = open_output(dir / "fit_plot.csv");
        CsvWriter csv(out, manifest);
        csv.header({"x", "f_star", "mean", "ci_lo", "ci_hi", "band_lo", "band_hi"});
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const double var = std::max(gp.cov(ii, ii) - gp.jitter, 0.0);
            const PointwiseInterval ci = pointwise_interval(gp.mean(ii), var, level);
            const double f = synthetic ? truth[i] : std::nan("");
            if (synthetic) sup_error = std::max(sup_error, std::abs(gp.mean(ii) - truth[i]));
            const double row[] = {grid[i], f, gp.mean(ii), ci.lower(), ci.upper(),
                                  gp.mean(ii) - band.radius, gp.mean(ii) + band.radius};
            csv.row(row);
        }
    }
    ordered_json j;
    j["manifest"] = manifest_object(config);
    j["n"] = data.size();
    j["alpha"] = alpha;
    j["lambda"] = lambda;
    j["level"] = level;
    j["band_radius"] = band.radius;
    j["band_draws"] = draws;
    if (synthetic) {
        j["sup_error"] = sup_error;
        j["f_star_in_band"] = band_contains(band, truth);
    }
    write_json(dir / "fit.json", j);
    write_manifest_cfg(dir, config);
}

void cmd_coverage(const Config& config) {
    const std::uint64_t seed = config.u64("seed");
    const std::vector<std::size_t> ns = config.counts("coverage.n");
    const std::vector<double> nus = config.reals("coverage.nu");
    const std::vector<double> levels = config.reals("coverage.levels");
    if (ns.empty() || nus.empty()) throw ConfigError("coverage.n and coverage.nu must not be empty");

    SimConfig base;
    base.betas = levels;
    base.replicates = config.count("coverage.replicates");
    base.sigma = config.real("data.sigma");
    base.grid_size = config.count("grid.size");
    base.draws = config.count("band.draws");
    base.theory_draws = config.count("theory.draws");
    base.threads = config.count("threads");
    base.lambda = lambda_from_config(config);

    ordered_json cells = ordered_json::array();
    std::vector<std::vector<double>> table(nus.size());
    for (std::size_t a = 0; a < nus.size(); ++a) {
        for (std::size_t n : ns) {
            SimConfig sim = base;
            sim.kernel_nu = nus[a];
            sim.n = n;
            sim.base_seed = derive_seed(seed, n, std::bit_cast<std::uint64_t>(nus[a]));
            const auto t0 = std::chrono::steady_clock::now();
            const CoverageReport r = run_replicates(sim);
            std::cerr << "coverage nu=" << nus[a] << " n=" << n << ":";
            for (double c : r.simultaneous) std::cerr << ' ' << c;
            std::cerr << " (" << seconds_since(t0) << " s)\n";
            table[a].insert(table[a].end(), r.simultaneous.begin(), r.simultaneous.end());

            ordered_json cell;
            cell["nu"] = sim.kernel_nu;
            cell["n"] = n;
            cell["alpha"] = sim.alpha();
            cell["lambda"] = r.lambda;
            cell["seed"] = sim.base_seed;
            cell["replicates"] = sim.replicates;
            cell["levels"] = levels;
            cell["simultaneous"] = r.simultaneous;
            cell["simultaneous_se"] = r.simultaneous_se;
            cell["pointwise_mean"] = r.pointwise_mean;
            cell["pointwise"] = r.pointwise;
            cell["sup_error"] = r.sup_error;
            cell["radius"] = r.radius;
            if (r.theory) {
                const TheoryPrediction& t = *r.theory;
                ordered_json th;
                th["alpha"] = t.alpha;
                th["h"] = t.h;
                th["c_ir_finite"] = t.c_ir_finite;
                th["c_ir_limit"] = t.c_ir_limit;
                th["spectral_tail_bound"] = t.spectral_tail_bound;
                th["pointwise_limit"] = t.pointwise_limit;
                th["pointwise_limit_unsquared"] = t.pointwise_limit_unsquared;
                th["pointwise_finite_mean"] = t.pointwise_finite_mean;
                th["band_limit"] = t.band_limit;
                cell["theory"] = th;
            }
            cells.push_back(cell);
        }
    }

    const std::filesystem::path dir = output_dir(config);
    ordered_json j;
    j["manifest"] = manifest_object(config);
    j["grid_size"] = base.grid_size;
    j["cells"] = cells;
    write_json(dir / "coverage.json", j);
    {
        auto out = open_output(dir / "coverage_table.csv");
        CsvWriter csv(out, manifest_json(config));
        std::vector<std::string> names{"nu"};
        for (std::size_t n : ns)
            for (double b : levels) names.push_back("n=" + std::to_string(n) + " beta=" + format_shortest(b));
        csv.header(names);
        for (std::size_t a = 0; a < nus.size(); ++a) {
            std::vector<double> row{nus[a]};
            row.insert(row.end(), table[a].begin(), table[a].end());
            csv.row(row);
        }
    }
    write_manifest_cfg(dir, config);
}

void cmd_asymptotic(const Config& config, std::ostream& out) {
    const double alpha = config.real("asymptotic.alpha");
    const double level = config.real("asymptotic.level");
    ordered_json j;
    j["manifest"] = manifest_object(config);
    j["alpha"] = alpha;
    j["level"] = level;
    j["c_ir_limit"] = c_ir_limit(alpha);
    j["coverage_sqrt"] = asymptotic_pointwise_coverage(alpha, level);
    j["coverage_unsquared"] = asymptotic_pointwise_coverage_unsquared(alpha, level);
    ordered_json rows = ordered_json::array();
    for (double h : config.reals("asymptotic.h")) {
        const SpectralModel model = SpectralModel::make(alpha, h, 1.0);
        const double cir = c_ir(model);
        const double z = normal_quantile(0.5 * (1.0 + level));
        ordered_json row;
        row["h"] = h;
        row["c_ir"] = cir;
        row["coverage_sqrt"] = 2.0 * normal_cdf(std::sqrt(cir) * z) - 1.0;
        row["coverage_unsquared"] = 2.0 * normal_cdf(cir * z) - 1.0;
        rows.push_back(row);
    }
    j["finite_h"] = rows;
    out << j.dump(2) << '\n';
}

void cmd_rates(const Config& config) {
    RateConfig rc;
    rc.ns = config.counts("rates.n");
    rc.alpha = config.real("rates.alpha");
    rc.smoothness_class = class_from_string("rates.class", config.str("rates.class"));
    const std::string truth = config.str("rates.truth");
    if (truth == "holder") rc.truth = RateTruth::Holder;
    else if (truth == "series") rc.truth = RateTruth::Series;
    else throw ConfigError("key 'rates.truth': expected holder or series, got '" + truth + "'");
    rc.seeds = config.count("rates.seeds");
    rc.sigma = config.real("data.sigma");
    rc.grid_size = config.count("grid.size");
    rc.base_seed = config.u64("seed");
    rc.threads = config.count("threads");

    const auto t0 = std::chrono::steady_clock::now();
    const RateReport r = rate_experiment(rc);
    std::cerr << "rates slope " << r.slope << " (" << seconds_since(t0) << " s)\n";

    const std::filesystem::path dir = output_dir(config);
    {
        auto out = open_output(dir / "rates.csv");
        CsvWriter csv(out, manifest_json(config));
        csv.header({"n", "h", "lambda", "median_error", "gamma_n", "delta_n", "bias_supnorm"});
        for (const RateRow& row : r.rows) {
            const double v[] = {static_cast<double>(row.n), row.h, row.lambda, row.median_error,
                                row.rates.gamma_n, row.rates.delta_n, row.rates.bias_supnorm};
            csv.row(v);
        }
    }
    ordered_json j;
    j["manifest"] = manifest_object(config);
    j["class_B"] = r.class_B;
    j["slope"] = r.slope;
    j["slope_ci95"] = {r.slope_ci_low, r.slope_ci_high};
    j["target_slope"] = r.target_slope;
    ordered_json rows = ordered_json::array();
    for (const RateRow& row : r.rows) {
        ordered_json o;
        o["n"] = row.n;
        o["h"] = row.h;
        o["lambda"] = row.lambda;
        o["median_error"] = row.median_error;
        o["errors"] = row.errors;
        o["gamma_n"] = row.rates.gamma_n;
        o["delta_n"] = row.rates.delta_n;
        o["bias_supnorm"] = row.rates.bias_supnorm;
        rows.push_back(o);
    }
    j["rows"] = rows;
    write_json(dir / "rates.json", j);
    write_manifest_cfg(dir, config);
}

}  // namespace gpcover
