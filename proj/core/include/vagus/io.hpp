#pragma once

#include <string>

#include "vagus/pipeline.hpp"
#include "vagus/sweep.hpp"

namespace vagus {

// Parses a sweep config JSON document ("//" comments allowed). Every field
// is optional and falls back to the built-in default; unknown keys raise
// ConfigError so typos cannot silently revert a value to its default.
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::string& path);

// JSON echo of a config, used in manifests and for `validate`.
std::string sweep_config_to_json(const SweepConfig& cfg);
std::string trial_config_to_json(const TrialConfig& cfg);

// Directory name for one trial relative to <output_dir>/trials/.
std::string trial_dir_name(std::size_t median_index, std::size_t trial_index);

// Writes one completed trial: manifest.json, spikes.csv, peaks.csv,
// releases.csv always; cascade.csv, voltage.csv, nt.csv when storage kind
// includes traces. Creates the directory.
void write_trial_dir(const std::string& dir,
                     const TrialConfig& cfg,
                     const RunRecord& rec,
                     const TrialMetrics& metrics,
                     double wall_ms,
                     TraceStorage storage);

// Manifest-only directory for a trial that diverged.
void write_failed_trial_dir(const std::string& dir,
                            const TrialConfig& cfg,
                            const std::string& stage,
                            double fail_time_s,
                            double wall_ms);

// manifest.json at sweep level: one deterministic row per trial.
void write_sweep_manifest(const SweepConfig& cfg, const SweepSummary& summary);

// summary.json, summary.csv and metrics_<i>.json per median. Assumes the
// manifest has been written already.
void write_sweep_outputs(const SweepConfig& cfg, const SweepSummary& summary);

// Recomputes metrics for `metrics --run-dir` from the event CSVs plus the
// manifest's config echo. Works for events_only directories too.
TrialMetrics recompute_metrics_from_dir(const std::string& dir);

}  // namespace vagus
