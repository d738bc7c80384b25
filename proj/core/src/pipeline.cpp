#include "vagus/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <tuple>
#include <utility>

#include "vagus/errors.hpp"

namespace vagus {

namespace {

// Stores every coarse_every-th sample plus fine-cadence samples inside a
// window around each spike (backward via a ring of recent samples, forward
// until the window expires). finalize() sorts and deduplicates.
class DecimatingRecorder : public SampleSink {
  public:
    DecimatingRecorder(double dt_hh_ms, const RecorderConfig& rc) {
        coarse_every_ = std::max<std::int64_t>(1, std::llround(rc.coarse_ms / dt_hh_ms));
        fine_every_ = std::max<std::int64_t>(1, std::llround(rc.fine_ms / dt_hh_ms));
        window_ = std::max<std::int64_t>(0, std::llround(rc.spike_window_ms / dt_hh_ms));
    }

    void on_sample(double t_s, double v_mv) override {
        if (k_ % coarse_every_ == 0) samples_.emplace_back(t_s, v_mv);
        if (k_ % fine_every_ == 0) {
            ring_.emplace_back(k_, t_s, v_mv);
            while (!ring_.empty() && std::get<0>(ring_.front()) + window_ < k_)
                ring_.pop_front();
            if (k_ <= fine_until_) samples_.emplace_back(t_s, v_mv);
        }
        ++k_;
    }

    // Called when the detector reports a spike at the current sample.
    void notify_spike() {
        for (const auto& [ki, t, v] : ring_) samples_.emplace_back(t, v);
        fine_until_ = k_ + window_;  // k_ already advanced past the sample
    }

    VoltageTrace finalize() {
        std::sort(samples_.begin(), samples_.end());
        samples_.erase(std::unique(samples_.begin(), samples_.end()),
                       samples_.end());
        VoltageTrace out;
        out.t.reserve(samples_.size());
        out.v.reserve(samples_.size());
        for (const auto& [t, v] : samples_) {
            out.t.push_back(t);
            out.v.push_back(v);
        }
        return out;
    }

  private:
    std::int64_t coarse_every_ = 1, fine_every_ = 1, window_ = 0;
    std::int64_t k_ = 0;
    std::int64_t fine_until_ = -1;
    std::deque<std::tuple<std::int64_t, double, double>> ring_;
    std::vector<std::pair<double, double>> samples_;
};

class DetectAndRecord : public SampleSink {
  public:
    DetectAndRecord(SpikeDetector& det, DecimatingRecorder& rec)
        : det_(det), rec_(rec) {}

    void on_sample(double t_s, double v_mv) override {
        const std::size_t before = det_.spikes().size();
        det_.on_sample(t_s, v_mv);
        if (det_.spikes().size() != before) rec_.notify_spike();
        rec_.on_sample(t_s, v_mv);
    }

  private:
    SpikeDetector& det_;
    DecimatingRecorder& rec_;
};

CascadeTrajectory decimate_cascade(const CascadeTrajectory& traj,
                                   double dt_cascade_s,
                                   double coarse_ms) {
    const auto stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(coarse_ms * 1e-3 / dt_cascade_s)));
    if (stride == 1) return traj;
    CascadeTrajectory out;
    for (std::size_t i = 0; i < traj.size(); i += stride) {
        out.t.push_back(traj.t[i]);
        out.g_alpha.push_back(traj.g_alpha[i]);
        out.plc.push_back(traj.plc[i]);
        out.ca_c.push_back(traj.ca_c[i]);
        out.ca_er.push_back(traj.ca_er[i]);
    }
    return out;
}

}  // namespace

void TrialConfig::validate() const {
    cascade.validate();
    hh.validate();
    synapse.validate();
    if (!(t_end_s > 0.0) || !std::isfinite(t_end_s))
        throw InvalidStateError("trial config: t_end_s must be finite and > 0");
    if (!(dt_cascade_s > 0.0) || !(dt_hh_ms > 0.0))
        throw InvalidStateError("trial config: step sizes must be > 0");
    if (!(bin_width_s > 0.0))
        throw InvalidStateError("trial config: bin_width_s must be > 0");
    if (!(refractory_ms >= 0.0))
        throw InvalidStateError("trial config: refractory_ms must be >= 0");
    if (!(peaks.min_height >= 0.0) || !(peaks.min_separation >= 0.0))
        throw InvalidStateError("trial config: peak thresholds must be >= 0");
    if (!(recorder.coarse_ms > 0.0) || !(recorder.fine_ms > 0.0) ||
        !(recorder.spike_window_ms >= 0.0))
        throw InvalidStateError("trial config: recorder cadences must be > 0");
    if (initial_state.g_alpha < 0.0 || initial_state.plc < 0.0 ||
        initial_state.ca_c < 0.0 || initial_state.ca_er < 0.0)
        throw InvalidStateError("trial config: initial state must be >= 0");
}

RunRecord run_trial(const TrialConfig& cfg) {
    cfg.validate();
    RunRecord rec;

    // Stage 1: receptor/calcium kinetics (deterministic).
    CascadeTrajectory traj =
        integrate_cascade(cfg.initial_state, cfg.cascade, cfg.t_end_s, cfg.dt_cascade_s);
    rec.ca_peaks = detect_ca_peaks(traj, cfg.peaks);

    // Stage 2: membrane dynamics driven by interpolated ca_c (deterministic).
    SpikeDetector det(cfg.synapse.v_th_mv, cfg.refractory_ms);
    DecimatingRecorder vrec(cfg.dt_hh_ms, cfg.recorder);
    DetectAndRecord sink(det, vrec);
    simulate_neuron_stream(traj, cfg.hh, cfg.t_end_s, cfg.dt_hh_ms,
                           hh_rest_state(), sink);
    rec.spikes = det.take_spikes();
    rec.voltage = vrec.finalize();

    // Stage 3: stochastic vesicle release (the only seeded stage).
    Rng rng(cfg.seed);
    SynapseResult syn =
        simulate_synapse(rec.spikes, cfg.synapse, rng, cfg.t_end_s,
                         cfg.recorder.coarse_ms * 1e-3);
    rec.nt = std::move(syn.trace);
    rec.events = std::move(syn.events);
    rec.releases = release_times(rec.events);

    rec.cascade = decimate_cascade(traj, cfg.dt_cascade_s, cfg.recorder.coarse_ms);
    return rec;
}

TrialMetrics compute_trial_metrics(const RunRecord& rec,
                                   const TrialConfig& cfg) {
    TrialMetrics m;
    m.n_peaks = rec.ca_peaks.size();
    m.n_spikes = rec.spikes.size();
    m.n_releases = rec.releases.size();

    const double w = cfg.bin_width_s;
    const auto x = binarize_events(rec.ca_peaks, 0.0, cfg.t_end_s, w);
    const auto y = binarize_events(rec.releases, 0.0, cfg.t_end_s, w);
    m.mi = mutual_information(joint_probabilities(x, y));

    // Same statistic with the bin grid displaced half a width; recorded so
    // runs expose their sensitivity to bin phase.
    if (cfg.t_end_s > 0.5 * w) {
        const auto xs = binarize_events(rec.ca_peaks, 0.5 * w, cfg.t_end_s, w);
        const auto ys = binarize_events(rec.releases, 0.5 * w, cfg.t_end_s, w);
        m.mi_half_bin_shift = mutual_information(joint_probabilities(xs, ys));
    }

    const DelayStats d = compute_delays(rec.ca_peaks, rec.releases);
    m.delay_mean = d.mean;
    m.delay_std = d.std_dev;
    m.n_delays = d.delays.size();
    return m;
}

}  // namespace vagus
