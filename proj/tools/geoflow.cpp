// geoflow: run registered experiments from config files.
//
//   geoflow list
//   geoflow run --config PATH [--seed N] [--out DIR] [--threads N]
//   geoflow verify [NAME...] [--seed N] [--out DIR] [--threads N]
//
// Exit status: 0 all checks pass, 1 a tolerance check failed (or a module
// error aborted the run), 2 usage or configuration error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "geoflow/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct CommonOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("--seed", o.seed, "override run.seed");
    cmd.add_option("--out", o.out, "override output.dir");
    cmd.add_option("--threads", o.threads, "worker threads (results do not depend on it)")->check(CLI::Range(1u, 1024u));
}

void print_rows(const geoflow::ExperimentResult& r) {
    for (const auto& row : r.rows) {
        std::printf("  %-4s %-22s %-34s %s %s %s\n", row.pass ? "ok" : "FAIL", row.parameter.c_str(),
                    row.statistic.c_str(), geoflow::format_double(row.value).c_str(), geoflow::to_string(row.compare),
                    geoflow::format_double(row.bound).c_str());
    }
}

int run_one(const geoflow::Config& cfg, const CommonOptions& o, bool write) {
    const geoflow::Parallelism par{o.threads};
    const auto plan = geoflow::plan_run(cfg, par);
    const auto start = std::chrono::steady_clock::now();
    const auto result = geoflow::execute(plan);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s: %s (%.1f s)\n", result.experiment.c_str(), result.pass() ? "pass" : "FAIL", secs);
    print_rows(result);
    if (write) {
        for (const auto& p : geoflow::write_result(result, plan.out_dir)) std::printf("  wrote %s\n", p.string().c_str());
    }
    return result.pass() ? kExitPass : kExitFail;
}

geoflow::Config apply_overrides(geoflow::Config cfg, const CommonOptions& o) {
    if (o.seed) cfg.set("run.seed", std::to_string(*o.seed));
    if (o.out) cfg.set("output.dir", *o.out);
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equidistribution experiments for translated curves in hyperbolic manifolds"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list registered experiments");

    CommonOptions run_opts;
    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("--config", config_path, "config file")->required();
    add_common(*run, run_opts);

    CommonOptions verify_opts;
    std::vector<std::string> names;
    auto* verify = app.add_subcommand("verify", "run experiments with their reference settings");
    verify->add_option("names", names, "experiments to run (default: all)");
    add_common(*verify, verify_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*list) {
            for (const auto& e : geoflow::registry())
                std::printf("%-26s %s\n%-26s   exercises: %s\n", e.name.c_str(), e.description.c_str(), "",
                            e.exercises.c_str());
            return kExitPass;
        }
        if (*run) {
            const auto cfg = apply_overrides(geoflow::Config::load(config_path), run_opts);
            return run_one(cfg, run_opts, true);
        }
        // verify
        if (names.empty())
            for (const auto& e : geoflow::registry()) names.push_back(e.name);
        int status = kExitPass;
        for (const auto& name : names) {
            geoflow::Config cfg("<" + name + " defaults>");
            cfg.set("experiment.name", name);
            cfg = apply_overrides(cfg, verify_opts);
            const int s = run_one(cfg, verify_opts, verify_opts.out.has_value());
            if (s != kExitPass) status = s;
        }
        return status;
    } catch (const geoflow::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kExitUsage;
    } catch (const geoflow::ExperimentError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    } catch (const geoflow::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFail;
    }
}
