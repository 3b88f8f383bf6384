#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "kinslab/commands.hpp"
#include "kinslab/errors.hpp"
#include "kinslab/verify.hpp"
#include "kinslab/worker_pool.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kNumerical = 3, kVerify = 4 };

kinslab::RunConfig load_or_default(const std::string& path) {
    return path.empty() ? kinslab::parse_config("") : kinslab::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic kinetic slab solver and verification harness"};
    app.set_version_flag("--version", kinslab::version_string());
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    unsigned workers = kinslab::default_workers();
    std::vector<double> epsilons;

    auto* run = app.add_subcommand("run", "single run: diagnostics.csv and summary.json");
    run->add_option("--config", config_path, "INI configuration")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory");

    auto* sweep = app.add_subcommand("sweep", "one run per epsilon and the rate table");
    sweep->add_option("--config", config_path, "base configuration (defaults if omitted)")->check(CLI::ExistingFile);
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--workers", workers, "concurrent member runs")->check(CLI::PositiveNumber);
    sweep->add_option("--eps", epsilons, "epsilon list")->delimiter(',')->required();

    auto* limit = app.add_subcommand("limit", "diffusion-limit study over epsilon");
    limit->add_option("--config", config_path, "base configuration (defaults if omitted)")->check(CLI::ExistingFile);
    limit->add_option("--out", out_dir, "output directory");
    limit->add_option("--workers", workers, "concurrent member runs")->check(CLI::PositiveNumber);
    limit->add_option("--eps", epsilons, "epsilon list")->delimiter(',')->required();

    std::uint64_t seed = 20240611;
    std::string fault = "none";
    auto* verify = app.add_subcommand("verify", "invariant suites of every module");
    verify->add_option("--seed", seed, "seed for the randomized cases");
    verify->add_option("--fault", fault, "inject a fault: none|flip-weight");

    std::string csv_path, column = "norm_f_minus_Mc";
    double fit_eps = 1.0;
    std::optional<double> t0, t1;
    auto* fit = app.add_subcommand("fit", "re-fit a decay rate from a diagnostics CSV");
    fit->add_option("--csv", csv_path, "diagnostics.csv of a run")->required()->check(CLI::ExistingFile);
    fit->add_option("--column", column, "column to fit");
    fit->add_option("--t0", t0, "window start");
    fit->add_option("--t1", t1, "window end");
    fit->add_option("--eps", fit_eps, "epsilon for the default window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*run) {
            const auto summary = kinslab::cmd_run(kinslab::load_config(config_path), out_dir);
            std::cout << summary["final"].dump(2) << '\n';
        } else if (*sweep) {
            const auto result = kinslab::cmd_sweep(load_or_default(config_path), epsilons, workers, out_dir);
            std::cout << "lambda_ratio " << result["lambda_ratio"].dump() << (result["partial"].get<bool>() ? " (partial)" : "")
                      << '\n';
            if (result["partial"].get<bool>()) return kNumerical;
        } else if (*limit) {
            const auto result = kinslab::cmd_limit(load_or_default(config_path), epsilons, workers, out_dir);
            for (const char* key : {"order_raw", "order_corrected", "monotone_corrected"}) {
                if (result.contains(key)) std::cout << key << ' ' << result[key].dump() << '\n';
            }
            if (result["partial"].get<bool>()) return kNumerical;
        } else if (*verify) {
            const auto report = kinslab::cmd_verify(seed, kinslab::parse_fault_mode(fault));
            kinslab::print_report(std::cout, report);
            return report.passed() ? kOk : kVerify;
        } else if (*fit) {
            std::optional<kinslab::FitWindow> window;
            if (t0 || t1) {
                if (!t0 || !t1) throw kinslab::ConfigError("--t0 and --t1 must be given together");
                window = kinslab::FitWindow{*t0, *t1};
            }
            std::cout << kinslab::cmd_fit(csv_path, column, window, fit_eps).dump(2) << '\n';
        }
    } catch (const kinslab::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const kinslab::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
    return kOk;
}
