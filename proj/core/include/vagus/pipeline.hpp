#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "vagus/cascade.hpp"
#include "vagus/metrics.hpp"
#include "vagus/neuron.hpp"
#include "vagus/synapse.hpp"

namespace vagus {

// Trace thinning for storage. Event detection always runs on the
// full-resolution stream; only what gets stored is decimated.
struct RecorderConfig {
    double coarse_ms = 1.0;        // baseline voltage sampling
    double fine_ms = 0.1;          // sampling near spikes
    double spike_window_ms = 5.0;  // half-width of the fine window
};

// Everything one end-to-end trial needs. The seed drives only the synaptic
// release draws; the cascade and membrane stages are deterministic.
struct TrialConfig {
    CascadeParams cascade;
    HHParams hh;
    SynapseParams synapse;
    PeakConfig peaks;
    CascadeState initial_state;
    double t_end_s = 200.0;
    double dt_cascade_s = 1e-3;
    double dt_hh_ms = 0.01;
    double bin_width_s = 1.0;   // metrics binning
    double refractory_ms = 2.0; // spike detector dead time
    RecorderConfig recorder;
    std::uint64_t seed = 0;

    void validate() const;
};

struct RunRecord {
    CascadeTrajectory cascade;         // decimated to the coarse grid
    VoltageTrace voltage;              // coarse grid + fine windows at spikes
    NTTrace nt;                        // coarse grid
    std::vector<double> ca_peaks;      // s
    std::vector<double> spikes;        // s, full-resolution detection
    std::vector<ReleaseEvent> events;  // one per spike, zero draws included
    std::vector<double> releases;      // event times with vesicles >= 1
};

// Cascade -> membrane -> release, strictly feed-forward. Stage failures
// surface as DivergenceError with the stage field set ("cascade"/"neuron").
RunRecord run_trial(const TrialConfig& cfg);

struct TrialMetrics {
    double mi = 0.0;                 // bits/bin, peak sequence vs release sequence
    double mi_half_bin_shift = 0.0;  // same MI with the bin grid shifted w/2
    std::optional<double> delay_mean;
    std::optional<double> delay_std;
    std::size_t n_delays = 0;
    std::size_t n_peaks = 0;
    std::size_t n_spikes = 0;
    std::size_t n_releases = 0;
};

TrialMetrics compute_trial_metrics(const RunRecord& rec,
                                   const TrialConfig& cfg);

}  // namespace vagus
