#pragma once

#include <vector>

#include "vagus/cascade.hpp"

namespace vagus {

// Membrane and channel constants. Voltages mV, conductances mS/cm^2,
// capacitance uF/cm^2, currents uA/cm^2. Gate kinetics run per ms.
struct HHParams {
    double c_m = 1.0;
    double g_na = 120.0;
    double g_k = 36.0;
    double g_l = 0.3;
    double g_cak = 0.1;   // Ca-gated K conductance per unit cytosolic Ca
    double e_na = 50.0;
    double e_k = -77.0;
    double e_l = -54.387;
    double e_cak = -80.0;
    double i_ext = 10.0;  // constant drive, keeps the cell tonically firing

    void validate() const;
};

struct HHState {
    double v = -65.0;  // mV
    double m = 0.0;
    double h = 0.0;
    double n = 0.0;
};

struct GatingRates {
    double alpha_m, beta_m;
    double alpha_h, beta_h;
    double alpha_n, beta_n;  // all per ms
};

// Voltage-dependent opening/closing rates with the removable singularities
// at v = -40 (alpha_m) and v = -55 (alpha_n) handled exactly.
GatingRates gating_rates(double v);

// Single-exponential evaluation used on the integrator hot path. Agrees with
// gating_rates to a few ulps away from the singular strips and falls back to
// the exact form within them; exposed so tests can pin the agreement.
GatingRates fast_gating_rates(double v);

struct IonicCurrents {
    double i_na, i_k, i_l, i_cak;  // uA/cm^2, outward positive
};

// ca is cytosolic calcium in uM acting as a dimensionless scale on g_cak.
IonicCurrents ionic_currents(const HHState& s, double ca, const HHParams& p);

// Time-derivative of (v, m, h, n) per ms at fixed ca.
HHState hh_rhs(const HHState& s, double ca, const HHParams& p);

// Gate steady state at holding potential v; default resting point.
HHState hh_rest_state(double v = -65.0);

struct VoltageTrace {
    std::vector<double> t;  // seconds
    std::vector<double> v;  // mV
};

// Receives every integration sample (including t = 0). Implementations:
// full-resolution recording, decimated recording, spike detection.
class SampleSink {
  public:
    virtual ~SampleSink() = default;
    virtual void on_sample(double t_s, double v_mv) = 0;
};

// Integrates the membrane from t = 0 to t_end_s (RK4, step dt_hh_ms) against
// a calcium trajectory sampled on a coarser grid; ca_c is linearly
// interpolated between cascade samples and held at the edge values outside
// the grid. Gates are clamped to [0,1] after every step. Throws
// DivergenceError (stage "neuron") if |v| exceeds 200 mV.
void simulate_neuron_stream(const CascadeTrajectory& ca,
                            const HHParams& p,
                            double t_end_s,
                            double dt_hh_ms,
                            const HHState& init,
                            SampleSink& sink);

// Convenience wrapper returning the full-resolution trace. Prefer the
// streaming form for long horizons; this one stores every substep.
VoltageTrace simulate_neuron(const CascadeTrajectory& ca,
                             const HHParams& p,
                             double t_end_s,
                             double dt_hh_ms = 0.01,
                             const HHState& init = hh_rest_state());

// Upward threshold crossings, at linearly interpolated crossing times.
// Crossings closer than refractory_ms to the previous accepted spike are
// ignored. Returns sorted times in seconds.
std::vector<double> detect_spikes(const VoltageTrace& trace,
                                  double v_th_mv,
                                  double refractory_ms = 2.0);

// Streaming version of detect_spikes with identical semantics.
class SpikeDetector : public SampleSink {
  public:
    SpikeDetector(double v_th_mv, double refractory_ms = 2.0)
        : v_th_(v_th_mv), refractory_s_(refractory_ms * 1e-3) {}

    void on_sample(double t_s, double v_mv) override;
    const std::vector<double>& spikes() const { return spikes_; }
    std::vector<double> take_spikes() { return std::move(spikes_); }

  private:
    double v_th_;
    double refractory_s_;
    bool has_prev_ = false;
    double t_prev_ = 0.0, v_prev_ = 0.0;
    std::vector<double> spikes_;
};

}  // namespace vagus
