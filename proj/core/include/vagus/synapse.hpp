#pragma once

#include <vector>

#include "vagus/rng.hpp"

namespace vagus {

// Vesicle pool and cleft constants. The pool does not deplete: every spike
// draws Binomial(n_vesicles, p_release) afresh.
struct SynapseParams {
    int n_vesicles = 100;
    double nt_per_vesicle_mol = 1e-6;  // mol released per vesicle
    double v_syn_cm3 = 1e-18;          // cleft volume
    double p_release = 0.5;
    double tau_rec_ms = 10.0;          // cleft clearance time constant
    double v_th_mv = 20.0;             // spike threshold for the detector

    void validate() const;
};

// One presynaptic spike's outcome. vesicles == 0 events are kept here for
// bookkeeping but are not releases (metrics ignore them).
struct ReleaseEvent {
    double t = 0.0;          // s, spike time
    int vesicles = 0;        // in [0, n_vesicles]
    double delta_nt = 0.0;   // mol/cm^3 added to the cleft
};

// Cleft concentration sampled on a uniform grid. Between events the decay is
// evaluated analytically (exact exponential, no per-step integration error).
struct NTTrace {
    std::vector<double> t;   // seconds
    std::vector<double> nt;  // mol/cm^3, >= 0
};

struct SynapseResult {
    NTTrace trace;
    std::vector<ReleaseEvent> events;  // one per input spike, sorted by time
};

// Single vesicle-count draw for one spike.
int sample_vesicles(Rng& rng, const SynapseParams& p);

// Concentration step for k vesicles: k * nt_per_vesicle / v_syn, exactly.
double delta_nt(int vesicles, const SynapseParams& p);

// Runs the release process over sorted spike times, sampling the cleft on a
// grid of width dt_s from 0 to t_end_s. nt0 is the initial concentration.
// Unsorted spikes raise OrderingError.
SynapseResult simulate_synapse(const std::vector<double>& spike_times,
                               const SynapseParams& p,
                               Rng& rng,
                               double t_end_s,
                               double dt_s = 1e-3,
                               double nt0 = 0.0);

// Times of events that actually released vesicles (vesicles >= 1).
std::vector<double> release_times(const std::vector<ReleaseEvent>& events);

}  // namespace vagus
