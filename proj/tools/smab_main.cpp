// Experiment runner CLI: seeded Monte Carlo studies of the streaming bandit
// policies, parameter sweeps with scaling fits, and bound-verification suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smab/experiment.hpp"
#include "smab/verify.hpp"

namespace {

std::vector<long long> parse_ll_list(const std::string& text) {
    std::vector<long long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stoll(item));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output path: " + path);
    out << content;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming multi-armed bandit experiment runner"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "run seeded trials, emit CSV");
    run->set_config("--config", "", "flat key=value config file; flags override");
    smab::ExperimentSpec spec;
    std::string m_list = "2", T_list, means_list, family, out_path;
    std::uint64_t permute_seed = 0;
    bool has_permute = false;
    int k = 0, best_pos = 1;
    double eps_override = 0.0;
    bool has_eps = false;
    run->add_option("--policy", spec.policy, "auto|large|small|plain-ucb");
    run->add_option("--n", spec.n, "number of arms");
    run->add_option("--m", m_list, "memory size, comma list allowed");
    run->add_option("--T", T_list, "horizon, comma list allowed")->required();
    run->add_option("--alpha", spec.alpha, "trade-off parameter, >= 1");
    run->add_option("--means", means_list, "explicit comma list of arm means");
    bool uniform_gaps = false;
    run->add_flag("--uniform-gaps", uniform_gaps,
                  "best arm 0.9, gaps uniform in [0.1, 0.4), frozen by the master seed");
    run->add_option("--family", family, "hard family: I|Iprime|I0");
    run->add_option("--k", k, "hard-family head length");
    run->add_option("--best-pos", best_pos, "best-arm position in the head");
    run->add_option("--eps", eps_override, "override the derived hard-family epsilon")
        ->each([&](const std::string&) { has_eps = true; });
    run->add_option("--trials", spec.trials, "Monte Carlo trials per grid point");
    run->add_option("--seed", spec.seed, "master seed");
    run->add_option("--out", out_path, "CSV output path (default stdout)");
    run->add_option("--jobs", spec.jobs, "worker threads; never affects results");
    run->add_flag("--trace", spec.trace, "also emit a per-round event log");
    run->add_option("--permute-seed", permute_seed, "shuffle the stream order")
        ->each([&](const std::string&) { has_permute = true; });

    // ---- verify ----
    auto* verify = app.add_subcommand("verify", "run a bound-verification suite");
    std::string suite, verify_out;
    std::uint64_t verify_seed = 0;
    bool has_verify_seed = false;
    verify->add_option("suite", suite, "kl|hoeffding|ucb-bound|single-pass|bar-bound")
        ->required();
    verify->add_option("--seed", verify_seed, "override the suite's fixed seed")
        ->each([&](const std::string&) { has_verify_seed = true; });
    verify->add_option("--out", verify_out, "JSON report path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            spec.T_grid = parse_ll_list(T_list);
            for (long long m : parse_ll_list(m_list)) spec.m_grid.push_back(static_cast<int>(m));
            if (!means_list.empty()) {
                spec.source.kind = smab::InstanceKind::ExplicitMeans;
                spec.source.means = parse_double_list(means_list);
                if (spec.n == 0) spec.n = static_cast<int>(spec.source.means.size());
            } else if (!family.empty()) {
                spec.source.kind = smab::InstanceKind::HardFamily;
                spec.source.family = family;
                spec.source.k = k;
                spec.source.best_pos = best_pos;
                if (has_eps) spec.source.eps_override = eps_override;
            } else if (uniform_gaps) {
                spec.source.kind = smab::InstanceKind::UniformGaps;
            } else {
                throw smab::ConfigError("one of --means, --family, --uniform-gaps is required");
            }
            if (has_permute) spec.source.permute_seed = permute_seed;

            smab::RunResult result = smab::run_experiment(spec);
            std::string csv = smab::to_csv(result);
            const bool sweeping = spec.T_grid.size() > 1 || spec.m_grid.size() > 1;
            if (sweeping) {
                smab::ScalingFit fit = smab::sweep_fit(result);
                char line[160];
                std::snprintf(line, sizeof(line),
                              "# loglog_slope=%.6f intercept=%.6f residual_stderr=%.6f points=%d\n",
                              fit.slope, fit.intercept, fit.residual_stderr, fit.points);
                csv += line;
                std::fprintf(stderr, "%s", line);
            }
            write_output(out_path, csv);
            if (spec.trace) {
                write_output(out_path.empty() ? "" : out_path + ".trace.csv",
                             smab::to_trace_csv(result));
            }
            return 0;
        }

        smab::SuiteReport report = has_verify_seed
                                       ? smab::run_suite(suite, verify_seed)
                                       : [&] {
                                             if (suite == "kl") return smab::verify_kl();
                                             if (suite == "hoeffding") return smab::verify_hoeffding();
                                             if (suite == "ucb-bound") return smab::verify_ucb_bound();
                                             if (suite == "single-pass") return smab::verify_single_pass();
                                             if (suite == "bar-bound") return smab::verify_bar_bound();
                                             throw smab::ConfigError("unknown verification suite: " + suite);
                                         }();
        write_output(verify_out, smab::to_json(report).dump(2) + "\n");
        return report.pass() ? 0 : 1;
    } catch (const smab::ConfigError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const smab::ValidationError& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
