// Command-line front end: single runs, Monte Carlo sweeps, metric recompute
// and config validation. Exit codes: 0 success, 2 invalid config or usage,
// 3 simulation failure (divergence / failed-trial fraction too high).

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "vagus/errors.hpp"
#include "vagus/io.hpp"
#include "vagus/pipeline.hpp"
#include "vagus/rng.hpp"
#include "vagus/sweep.hpp"

namespace {

int cmd_simulate(const std::string& config_path,
                 const std::optional<std::uint64_t>& seed,
                 int trials,
                 const std::optional<std::string>& out,
                 const std::optional<double>& k1) {
    vagus::SweepConfig cfg = vagus::load_sweep_config(config_path);
    if (out) cfg.output_dir = *out;
    if (seed) cfg.master_seed = *seed;

    // One deterministic configuration, repeated `trials` times with fresh
    // synapse seeds; k1 comes from the template (or --k1), never from a draw.
    for (int t = 0; t < trials; ++t) {
        vagus::TrialConfig tc = cfg.trial_template;
        if (k1) tc.cascade.k1 = *k1;
        tc.seed = vagus::derive_seed(cfg.master_seed, 0,
                                     static_cast<std::uint64_t>(t),
                                     vagus::StreamTag::synapse);
        const auto t0 = std::chrono::steady_clock::now();
        const vagus::RunRecord rec = vagus::run_trial(tc);
        const double wall =
            std::chrono::duration<double, std::milli>(
                std::chrono::steady_clock::now() - t0)
                .count();
        const vagus::TrialMetrics m = vagus::compute_trial_metrics(rec, tc);

        if (!cfg.output_dir.empty()) {
            const std::string dir = cfg.output_dir + "/trials/" +
                                    vagus::trial_dir_name(0, static_cast<std::size_t>(t));
            vagus::write_trial_dir(dir, tc, rec, m, wall, cfg.store_traces);
        }
        std::printf(
            "trial %d: peaks=%zu spikes=%zu releases=%zu mi=%.6g delay_mean=%s\n",
            t, m.n_peaks, m.n_spikes, m.n_releases, m.mi,
            m.delay_mean ? std::to_string(*m.delay_mean).c_str() : "n/a");
    }
    return 0;
}

int cmd_sweep(const std::string& config_path,
              int workers,
              const std::optional<std::uint64_t>& seed,
              const std::optional<int>& trials,
              const std::optional<std::string>& out) {
    vagus::SweepConfig cfg = vagus::load_sweep_config(config_path);
    if (seed) cfg.master_seed = *seed;
    if (trials) cfg.trials_per_median = *trials;
    if (out) cfg.output_dir = *out;

    const vagus::SweepSummary s = vagus::run_sweep(cfg, workers);
    std::printf("k1_median  mi_mean    delay_mean_s  spikes_mean  peaks_mean\n");
    for (const auto& r : s.rows)
        std::printf("%-9.4g  %-9.5g  %-12s  %-11.1f  %-10.3f\n", r.k1_median,
                    r.mi_mean,
                    r.delay_mean ? std::to_string(*r.delay_mean).c_str() : "n/a",
                    r.spikes_mean, r.peaks_mean);
    std::printf("trials: %zu total, %zu failed\n", s.n_total, s.n_failed);
    if (!cfg.output_dir.empty())
        std::printf("outputs in %s\n", cfg.output_dir.c_str());
    return 0;
}

int cmd_metrics(const std::string& run_dir) {
    const vagus::TrialMetrics m = vagus::recompute_metrics_from_dir(run_dir);
    std::printf("{\n");
    std::printf("  \"mi_bits_per_bin\": %.17g,\n", m.mi);
    std::printf("  \"mi_half_bin_shift\": %.17g,\n", m.mi_half_bin_shift);
    if (m.delay_mean)
        std::printf("  \"delay_mean_s\": %.17g,\n", *m.delay_mean);
    else
        std::printf("  \"delay_mean_s\": null,\n");
    if (m.delay_std)
        std::printf("  \"delay_std_s\": %.17g,\n", *m.delay_std);
    else
        std::printf("  \"delay_std_s\": null,\n");
    std::printf("  \"n_delays\": %zu,\n", m.n_delays);
    std::printf("  \"peaks\": %zu,\n  \"spikes\": %zu,\n  \"releases\": %zu\n",
                m.n_peaks, m.n_spikes, m.n_releases);
    std::printf("}\n");
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const vagus::SweepConfig cfg = vagus::load_sweep_config(config_path);
    std::printf("%s\n", vagus::sweep_config_to_json(cfg).c_str());
    std::fprintf(stderr, "config ok\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Molecular-communication channel simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string run_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials_opt;
    std::optional<std::string> out;
    std::optional<double> k1;
    int trials = 1;
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;

    auto* sim = app.add_subcommand("simulate", "Run trials at a fixed k1");
    sim->add_option("--config", config_path, "Config JSON")->required();
    sim->add_option("--seed", seed, "Override master seed");
    sim->add_option("--trials", trials, "Trial repetitions");
    sim->add_option("--out", out, "Override output directory");
    sim->add_option("--k1", k1, "Override the template's k1");

    auto* sw = app.add_subcommand("sweep", "Monte Carlo sweep over k1 medians");
    sw->add_option("--config", config_path, "Config JSON")->required();
    sw->add_option("--workers", workers, "Worker threads");
    sw->add_option("--seed", seed, "Override master seed");
    sw->add_option("--trials", trials_opt, "Override trials per median");
    sw->add_option("--out", out, "Override output directory");

    auto* me = app.add_subcommand("metrics", "Recompute metrics for one trial dir");
    me->add_option("--run-dir", run_dir, "Trial directory")->required();

    auto* va = app.add_subcommand("validate", "Validate a config file");
    va->add_option("--config", config_path, "Config JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(config_path, seed, trials, out, k1);
        if (sw->parsed()) return cmd_sweep(config_path, workers, seed, trials_opt, out);
        if (me->parsed()) return cmd_metrics(run_dir);
        if (va->parsed()) return cmd_validate(config_path);
    } catch (const vagus::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const vagus::SweepError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const vagus::DivergenceError& e) {
        std::fprintf(stderr, "error: stage %s diverged at t = %g s: %s\n",
                     e.stage.c_str(), e.t_fail, e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
