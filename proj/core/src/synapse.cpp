#include "vagus/synapse.hpp"

#include <cmath>

#include "vagus/errors.hpp"

namespace vagus {

void SynapseParams::validate() const {
    if (n_vesicles < 0)
        throw InvalidStateError("synapse params: n_vesicles must be >= 0");
    if (!(p_release >= 0.0 && p_release <= 1.0))
        throw InvalidStateError("synapse params: p_release must lie in [0,1]");
    if (!(nt_per_vesicle_mol >= 0.0) || !(v_syn_cm3 > 0.0))
        throw InvalidStateError("synapse params: need nt_per_vesicle >= 0 and v_syn > 0");
    if (!(tau_rec_ms > 0.0))
        throw InvalidStateError("synapse params: tau_rec_ms must be > 0");
    if (!std::isfinite(v_th_mv))
        throw InvalidStateError("synapse params: v_th_mv must be finite");
}

int sample_vesicles(Rng& rng, const SynapseParams& p) {
    return rng.binomial(p.n_vesicles, p.p_release);
}

double delta_nt(int vesicles, const SynapseParams& p) {
    return static_cast<double>(vesicles) * p.nt_per_vesicle_mol / p.v_syn_cm3;
}

SynapseResult simulate_synapse(const std::vector<double>& spike_times,
                               const SynapseParams& p,
                               Rng& rng,
                               double t_end_s,
                               double dt_s,
                               double nt0) {
    p.validate();
    if (!(dt_s > 0.0) || !(t_end_s >= 0.0))
        throw InvalidStateError("simulate_synapse: need dt_s > 0 and t_end_s >= 0");
    if (!(nt0 >= 0.0))
        throw InvalidStateError("simulate_synapse: nt0 must be >= 0");
    for (std::size_t i = 1; i < spike_times.size(); ++i)
        if (spike_times[i] < spike_times[i - 1])
            throw OrderingError("simulate_synapse: spike times must be sorted ascending");

    const double tau_s = p.tau_rec_ms * 1e-3;
    const auto n_bins = static_cast<std::size_t>(std::ceil(t_end_s / dt_s - 1e-9));

    SynapseResult out;
    out.trace.t.reserve(n_bins + 1);
    out.trace.nt.reserve(n_bins + 1);
    out.events.reserve(spike_times.size());

    // Value and timestamp of the most recent discontinuity (start or event).
    double nt_ref = nt0;
    double t_ref = 0.0;
    std::size_t next_spike = 0;

    auto advance_through_spikes = [&](double t_limit) {
        // Apply every spike at time <= t_limit in order.
        while (next_spike < spike_times.size() &&
               spike_times[next_spike] <= t_limit) {
            const double ts = spike_times[next_spike];
            const double decayed = nt_ref * std::exp(-(ts - t_ref) / tau_s);
            const int k = sample_vesicles(rng, p);
            const double d = delta_nt(k, p);
            out.events.push_back({ts, k, d});
            nt_ref = decayed + d;
            t_ref = ts;
            ++next_spike;
        }
    };

    for (std::size_t i = 0; i <= n_bins; ++i) {
        const double t = static_cast<double>(i) * dt_s;
        advance_through_spikes(t);
        out.trace.t.push_back(t);
        out.trace.nt.push_back(nt_ref * std::exp(-(t - t_ref) / tau_s));
    }
    // Spikes after the last grid point but within [0, t_end] still count.
    advance_through_spikes(t_end_s);
    return out;
}

std::vector<double> release_times(const std::vector<ReleaseEvent>& events) {
    std::vector<double> out;
    out.reserve(events.size());
    for (const auto& e : events)
        if (e.vesicles >= 1) out.push_back(e.t);
    return out;
}

}  // namespace vagus
