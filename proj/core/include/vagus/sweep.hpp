#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vagus/pipeline.hpp"
#include "vagus/rng.hpp"

namespace vagus {

// Which files a trial directory gets: full set of trace CSVs, or only the
// event-level CSVs plus manifest (keeps large sweeps small on disk).
enum class TraceStorage { traces, events_only };

// Forces the drawn k1 of one specific trial; used to exercise failure
// isolation without touching any other trial.
struct TrialOverride {
    std::size_t median_index = 0;
    std::size_t trial_index = 0;
    double k1 = 0.0;
};

struct SweepConfig {
    std::vector<double> k1_medians = {1.82, 2.25, 2.68, 3.10, 3.67};
    // Lognormal mean/std ratio r: sigma = sqrt(ln(1 + 1/r^2)). Unset means
    // sigma = 0, i.e. every draw equals the median.
    std::optional<double> mean_to_std_ratio = 5.0;
    int trials_per_median = 100;
    std::uint64_t master_seed = 1;
    TrialConfig trial_template;
    std::string output_dir;  // empty: compute only, write nothing
    TraceStorage store_traces = TraceStorage::traces;
    std::vector<TrialOverride> override_trials;
    double failure_threshold = 0.10;  // fraction of failed trials tolerated

    void validate() const;
};

// One draw of the swept rate constant. With ratio unset or infinite the
// draw collapses to the median exactly.
double sample_k1(Rng& rng, double median, std::optional<double> ratio);

// Aggregates per median, successful trials only. delay stats are pooled
// over every matched peak of every trial, not averaged per trial.
struct SweepRow {
    double k1_median = 0.0;
    double mi_mean = 0.0;
    std::optional<double> mi_std;      // unset when fewer than 2 trials
    std::optional<double> delay_mean;  // unset when no delays at all
    std::optional<double> delay_std;
    double spikes_mean = 0.0;
    double peaks_mean = 0.0;
    double releases_mean = 0.0;
};

// Per-trial ledger row; deterministic (no wall-clock fields).
struct TrialRow {
    std::size_t median_index = 0;
    std::size_t trial_index = 0;
    double k1 = 0.0;
    std::uint64_t seed = 0;
    std::string status;  // "ok", "diverged", or "invalid"
    std::string fail_stage;
    double fail_time_s = 0.0;
    std::string dir;  // relative to output_dir, empty if nothing was written
    TrialMetrics metrics;
};

struct SweepSummary {
    std::vector<SweepRow> rows;
    std::vector<TrialRow> trials;
    std::size_t n_total = 0;
    std::size_t n_failed = 0;
};

// Runs trials_per_median trials at each median across a worker pool.
// Per-trial seeds derive from (master_seed, median index, trial index), so
// results do not depend on scheduling; the summary is byte-identical for
// any worker count. Failed trials are recorded and excluded; if more than
// failure_threshold of all trials fail, SweepError is thrown after the
// manifest is written.
SweepSummary run_sweep(const SweepConfig& cfg, int workers = 1);

}  // namespace vagus
