#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "gpcover/commands.hpp"
#include "gpcover/config.hpp"
#include "gpcover/posterior.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

using Overrides = std::vector<std::pair<std::string, std::string>>;

struct SubcommandArgs {
    std::string config_path;
    std::vector<std::string> sets;
    Overrides flags;
    bool print_config = false;
};

void key_flag(CLI::App* sub, SubcommandArgs& args, const std::string& flag, const std::string& key) {
    sub->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.flags.emplace_back(key, v); }, "sets " + key);
}

CLI::App* add_subcommand(CLI::App& app, const std::string& name, const std::string& help, SubcommandArgs& args) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", args.config_path, "key = value config file");
    sub->add_option("--set", args.sets, "key=value override, repeatable");
    sub->add_flag("--print-config", args.print_config, "print the accepted keys with their defaults and exit");
    key_flag(sub, args, "--seed", "seed");
    if (name != "asymptotic") {
        key_flag(sub, args, "-o,--out", "output.dir");
        key_flag(sub, args, "--threads", "threads");
    }
    return sub;
}

Overrides collect(const SubcommandArgs& args) {
    Overrides out = args.flags;
    for (const std::string& s : args.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw gpcover::ConfigError("--set expects key=value, got '" + s + "'");
        out.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return out;
}

void print_schema(const std::string& name) {
    for (const gpcover::KeyDef& k : gpcover::schema_for(name).keys)
        std::cout << k.name << " = " << k.default_value << "  # " << k.help << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frequentist coverage of Gaussian process credible sets"};
    app.set_version_flag("--version", gpcover::kToolVersion);
    app.require_subcommand(1);

    SubcommandArgs fit_args, cov_args, asy_args, rate_args;
    CLI::App* fit = add_subcommand(app, "fit", "fit one posterior and export intervals, band and plot data", fit_args);
    key_flag(fit, fit_args, "--data", "data.file");
    key_flag(fit, fit_args, "--n", "data.n");
    key_flag(fit, fit_args, "--nu", "kernel.nu");
    key_flag(fit, fit_args, "--sigma", "data.sigma");
    key_flag(fit, fit_args, "--level", "fit.level");

    CLI::App* cov = add_subcommand(app, "coverage", "replicated simultaneous and pointwise coverage", cov_args);
    key_flag(cov, cov_args, "--n", "coverage.n");
    key_flag(cov, cov_args, "--nu", "coverage.nu");
    key_flag(cov, cov_args, "--levels", "coverage.levels");
    key_flag(cov, cov_args, "--replicates", "coverage.replicates");

    CLI::App* asy = add_subcommand(app, "asymptotic", "limiting pointwise coverage and C_IR", asy_args);
    key_flag(asy, asy_args, "--alpha", "asymptotic.alpha");
    key_flag(asy, asy_args, "--level", "asymptotic.level");
    key_flag(asy, asy_args, "--bandwidth", "asymptotic.h");

    CLI::App* rates = add_subcommand(app, "rates", "sup-norm error rate of the posterior mean", rate_args);
    key_flag(rates, rate_args, "--n", "rates.n");
    key_flag(rates, rate_args, "--alpha", "rates.alpha");
    key_flag(rates, rate_args, "--seeds", "rates.seeds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    const std::pair<CLI::App*, SubcommandArgs*> subs[] = {
        {fit, &fit_args}, {cov, &cov_args}, {asy, &asy_args}, {rates, &rate_args}};
    try {
        for (const auto& [sub, args] : subs) {
            if (!sub->parsed()) continue;
            const std::string name = sub->get_name();
            if (args->print_config) {
                print_schema(name);
                return 0;
            }
            const gpcover::Config config = gpcover::resolve_config(name, args->config_path, collect(*args));
            if (name == "fit") gpcover::cmd_fit(config);
            else if (name == "coverage") gpcover::cmd_coverage(config);
            else if (name == "asymptotic") gpcover::cmd_asymptotic(config, std::cout);
            else gpcover::cmd_rates(config);
        }
    } catch (const gpcover::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const gpcover::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
