#include "vagus/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "vagus/errors.hpp"
#include "vagus/io.hpp"

namespace vagus {

void SweepConfig::validate() const {
    if (k1_medians.empty())
        throw ConfigError("sweep config: k1_medians must not be empty");
    for (double m : k1_medians)
        if (!(m > 0.0) || !std::isfinite(m))
            throw ConfigError("sweep config: k1 medians must be finite and > 0");
    if (mean_to_std_ratio && !(*mean_to_std_ratio > 0.0))
        throw ConfigError("sweep config: mean_to_std_ratio must be > 0 when set");
    if (trials_per_median < 1)
        throw ConfigError("sweep config: trials_per_median must be >= 1");
    if (!(failure_threshold >= 0.0 && failure_threshold <= 1.0))
        throw ConfigError("sweep config: failure_threshold must lie in [0,1]");
    for (const auto& o : override_trials) {
        if (o.median_index >= k1_medians.size() ||
            o.trial_index >= static_cast<std::size_t>(trials_per_median))
            throw ConfigError("sweep config: override index out of range");
    }
    trial_template.validate();
}

double sample_k1(Rng& rng, double median, std::optional<double> ratio) {
    if (!(median > 0.0) || !std::isfinite(median))
        throw InvalidStateError("sample_k1: median must be finite and > 0");
    double sigma = 0.0;
    if (ratio && std::isfinite(*ratio)) {
        if (!(*ratio > 0.0))
            throw InvalidStateError("sample_k1: ratio must be > 0");
        sigma = std::sqrt(std::log1p(1.0 / (*ratio * *ratio)));
    }
    return rng.lognormal(std::log(median), sigma);
}

namespace {

TrialRow execute_trial(const SweepConfig& cfg,
                       std::size_t m,
                       std::size_t t) {
    TrialRow row;
    row.median_index = m;
    row.trial_index = t;
    row.seed = derive_seed(cfg.master_seed, m, t, StreamTag::synapse);

    Rng draw(derive_seed(cfg.master_seed, m, t, StreamTag::k1_draw));
    row.k1 = sample_k1(draw, cfg.k1_medians[m], cfg.mean_to_std_ratio);
    for (const auto& o : cfg.override_trials)
        if (o.median_index == m && o.trial_index == t) row.k1 = o.k1;

    TrialConfig tc = cfg.trial_template;
    tc.cascade.k1 = row.k1;
    tc.seed = row.seed;

    const bool write = !cfg.output_dir.empty();
    const std::string rel = "trials/" + trial_dir_name(m, t);
    const std::string dir = cfg.output_dir + "/" + rel;

    const auto t0 = std::chrono::steady_clock::now();
    auto wall_ms = [&t0]() {
        return std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
            .count();
    };

    try {
        const RunRecord rec = run_trial(tc);
        row.metrics = compute_trial_metrics(rec, tc);
        row.status = "ok";
        if (write) {
            write_trial_dir(dir, tc, rec, row.metrics, wall_ms(),
                            cfg.store_traces);
            row.dir = rel;
        }
    } catch (const DivergenceError& e) {
        row.status = "diverged";
        row.fail_stage = e.stage;
        row.fail_time_s = e.t_fail;
        if (write) {
            write_failed_trial_dir(dir, tc, e.stage, e.t_fail, wall_ms());
            row.dir = rel;
        }
    } catch (const SimError&) {
        // Invalid parameter combinations (e.g. a hostile override) count as
        // failed trials, not as sweep-level crashes.
        row.status = "invalid";
        row.fail_stage = "config";
        row.fail_time_s = 0.0;
    }
    return row;
}

std::optional<double> sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return std::nullopt;
    double ss = 0.0;
    for (double x : xs) {
        const double r = x - mean;
        ss += r * r;
    }
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

SweepRow aggregate_median(double k1_median,
                          const std::vector<const TrialRow*>& ok) {
    SweepRow row;
    row.k1_median = k1_median;
    if (ok.empty()) return row;

    const double n = static_cast<double>(ok.size());
    std::vector<double> mis;
    mis.reserve(ok.size());
    for (const auto* r : ok) {
        mis.push_back(r->metrics.mi);
        row.spikes_mean += static_cast<double>(r->metrics.n_spikes);
        row.peaks_mean += static_cast<double>(r->metrics.n_peaks);
        row.releases_mean += static_cast<double>(r->metrics.n_releases);
    }
    for (double mi : mis) row.mi_mean += mi;
    row.mi_mean /= n;
    row.mi_std = sample_std(mis, row.mi_mean);
    row.spikes_mean /= n;
    row.peaks_mean /= n;
    row.releases_mean /= n;

    // Delays pool across trials: each matched peak is one sample. The pooled
    // moments reconstruct exactly from per-trial (n, mean, std).
    std::size_t nd = 0;
    double sum = 0.0;
    for (const auto* r : ok)
        if (r->metrics.delay_mean) {
            nd += r->metrics.n_delays;
            sum += *r->metrics.delay_mean *
                   static_cast<double>(r->metrics.n_delays);
        }
    if (nd >= 1) {
        const double pooled_mean = sum / static_cast<double>(nd);
        row.delay_mean = pooled_mean;
        if (nd >= 2) {
            double ss = 0.0;
            for (const auto* r : ok) {
                if (!r->metrics.delay_mean) continue;
                const double ni = static_cast<double>(r->metrics.n_delays);
                const double dm = *r->metrics.delay_mean - pooled_mean;
                if (r->metrics.delay_std)
                    ss += (ni - 1.0) * (*r->metrics.delay_std) *
                          (*r->metrics.delay_std);
                ss += ni * dm * dm;
            }
            row.delay_std = std::sqrt(ss / static_cast<double>(nd - 1));
        }
    }
    return row;
}

}  // namespace

SweepSummary run_sweep(const SweepConfig& cfg, int workers) {
    cfg.validate();
    const std::size_t n_medians = cfg.k1_medians.size();
    const auto n_trials = static_cast<std::size_t>(cfg.trials_per_median);
    const std::size_t total = n_medians * n_trials;

    SweepSummary summary;
    summary.n_total = total;
    summary.trials.resize(total);

    const int n_workers =
        std::max(1, std::min(workers, static_cast<int>(total)));
    if (n_workers == 1) {
        for (std::size_t i = 0; i < total; ++i)
            summary.trials[i] = execute_trial(cfg, i / n_trials, i % n_trials);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex err_mu;
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= total) return;
                    try {
                        summary.trials[i] =
                            execute_trial(cfg, i / n_trials, i % n_trials);
                    } catch (...) {
                        std::lock_guard<std::mutex> lk(err_mu);
                        if (!first_error)
                            first_error = std::current_exception();
                        return;
                    }
                }
            });
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    }

    for (const auto& row : summary.trials)
        if (row.status != "ok") ++summary.n_failed;

    // Aggregation walks trials in index order: the fold result cannot depend
    // on which worker finished first.
    summary.rows.reserve(n_medians);
    for (std::size_t m = 0; m < n_medians; ++m) {
        std::vector<const TrialRow*> ok;
        ok.reserve(n_trials);
        for (std::size_t t = 0; t < n_trials; ++t) {
            const auto& row = summary.trials[m * n_trials + t];
            if (row.status == "ok") ok.push_back(&row);
        }
        summary.rows.push_back(aggregate_median(cfg.k1_medians[m], ok));
    }

    const double fail_frac =
        static_cast<double>(summary.n_failed) / static_cast<double>(total);
    if (!cfg.output_dir.empty()) write_sweep_manifest(cfg, summary);
    if (fail_frac > cfg.failure_threshold)
        throw SweepError("sweep: " + std::to_string(summary.n_failed) + " of " +
                         std::to_string(total) +
                         " trials failed, above the allowed fraction");
    if (!cfg.output_dir.empty()) write_sweep_outputs(cfg, summary);
    return summary;
}

}  // namespace vagus
