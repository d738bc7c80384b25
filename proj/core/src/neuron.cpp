#include "vagus/neuron.hpp"

#include <cmath>
#include <string>

#include "vagus/errors.hpp"

namespace vagus {

namespace {

// exp(2.5), exp(1), exp(3): fold the shifted singular terms onto the shared
// exponential below (exp(-(v+40)/10) = e^2.5 * w^72 with w = exp(-(v+65)/720)).
constexpr double kE25 = 12.182493960703473;
constexpr double kE10 = 2.718281828459045;
constexpr double kE30 = 20.085536923187668;

// Same rates as gating_rates() but with a single exp per evaluation. 720 is
// the common denominator of the voltage scales 10, 18, 20, 80. Near the two
// removable singularities the quotient 1 - c*w^72 cancels badly, so within
// +-0.5 mV we fall back to the expm1 form; elsewhere the two paths agree to
// a few ulps (a test pins the agreement at 5e-12 relative).
struct FastRates {
    double am, bm, ah, bh, an, bn;
};

inline FastRates fast_rates(double v) {
    const double u = v + 65.0;
    const double w = std::exp(u * (-1.0 / 720.0));
    const double w2 = w * w, w4 = w2 * w2, w8 = w4 * w4;
    const double w9 = w8 * w;
    const double w16 = w8 * w8, w32 = w16 * w16;
    const double w36 = w32 * w4, w40 = w32 * w8;
    const double w72 = w36 * w36;

    FastRates r;
    r.bm = 4.0 * w40;          // 4 exp(-(v+65)/18)
    r.ah = 0.07 * w36;         // 0.07 exp(-(v+65)/20)
    r.bn = 0.125 * w9;         // 0.125 exp(-(v+65)/80)

    const double x = v + 40.0;
    const double y = v + 55.0;
    const double den_m = 1.0 - kE25 * w72;
    const double den_h = 1.0 + kE30 * w72;
    const double den_n = 1.0 - kE10 * w72;

    if ((x > 0.5 || x < -0.5) && (y > 0.5 || y < -0.5)) {
        // One reciprocal serves all three quotients (divisions dominate the
        // step cost on the hot path).
        const double hn = den_h * den_n;
        const double inv = 1.0 / (den_m * hn);
        r.am = 0.1 * x * hn * inv;
        r.bh = den_m * den_n * inv;
        r.an = 0.01 * y * (den_m * den_h) * inv;
        return r;
    }

    r.bh = 1.0 / den_h;
    if (x > 0.5 || x < -0.5)
        r.am = 0.1 * x / den_m;
    else
        r.am = (x == 0.0) ? 1.0 : 0.1 * x / (-std::expm1(x * -0.1));
    if (y > 0.5 || y < -0.5)
        r.an = 0.01 * y / den_n;
    else
        r.an = (y == 0.0) ? 0.1 : 0.01 * y / (-std::expm1(y * -0.1));
    return r;
}

// Derivative per ms of (v, m, h, n) with the fast rate path.
inline void rhs_fast(const double y[4], double ca, const HHParams& p,
                     double inv_cm, double out[4]) {
    const double v = y[0], m = y[1], h = y[2], n = y[3];
    const FastRates r = fast_rates(v);
    const double m3 = m * m * m;
    const double n2 = n * n;
    const double i_na = p.g_na * m3 * h * (v - p.e_na);
    const double i_k = p.g_k * n2 * n2 * (v - p.e_k);
    const double i_l = p.g_l * (v - p.e_l);
    const double i_cak = p.g_cak * ca * (v - p.e_cak);
    out[0] = (p.i_ext - i_na - i_k - i_l - i_cak) * inv_cm;
    out[1] = r.am * (1.0 - m) - r.bm * m;
    out[2] = r.ah * (1.0 - h) - r.bh * h;
    out[3] = r.an * (1.0 - n) - r.bn * n;
}

// Piecewise-linear view over the cascade's uniform ca_c grid, held constant
// beyond the ends. An empty trajectory reads as zero calcium.
struct CaView {
    const double* c = nullptr;
    std::size_t n = 0;
    double t0 = 0.0;
    double inv_dt = 0.0;

    explicit CaView(const CascadeTrajectory& traj) {
        if (traj.size() == 0) return;
        c = traj.ca_c.data();
        n = traj.size();
        t0 = traj.t.front();
        if (n >= 2) inv_dt = 1.0 / (traj.t[1] - traj.t[0]);
    }

    double at(double t_s) const {
        if (n == 0) return 0.0;
        const double x = (t_s - t0) * inv_dt;
        if (x <= 0.0 || n == 1) return c[0];
        if (x >= static_cast<double>(n - 1)) return c[n - 1];
        const auto i = static_cast<std::size_t>(x);
        const double f = x - static_cast<double>(i);
        return c[i] + f * (c[i + 1] - c[i]);
    }
};

}  // namespace

void HHParams::validate() const {
    if (!std::isfinite(c_m) || c_m <= 0.0)
        throw InvalidStateError("hh params: c_m must be finite and > 0");
    for (double g : {g_na, g_k, g_l, g_cak})
        if (!std::isfinite(g) || g < 0.0)
            throw InvalidStateError("hh params: conductances must be finite and >= 0");
    for (double x : {e_na, e_k, e_l, e_cak, i_ext})
        if (!std::isfinite(x))
            throw InvalidStateError("hh params: reversal potentials and i_ext must be finite");
}

GatingRates gating_rates(double v) {
    GatingRates r;
    if (v == -40.0) {
        r.alpha_m = 1.0;
    } else {
        const double x = v + 40.0;
        r.alpha_m = 0.1 * x / (-std::expm1(-x / 10.0));
    }
    r.beta_m = 4.0 * std::exp(-(v + 65.0) / 18.0);
    r.alpha_h = 0.07 * std::exp(-(v + 65.0) / 20.0);
    r.beta_h = 1.0 / (1.0 + std::exp(-(v + 35.0) / 10.0));
    if (v == -55.0) {
        r.alpha_n = 0.1;
    } else {
        const double x = v + 55.0;
        r.alpha_n = 0.01 * x / (-std::expm1(-x / 10.0));
    }
    r.beta_n = 0.125 * std::exp(-(v + 65.0) / 80.0);
    return r;
}

GatingRates fast_gating_rates(double v) {
    const FastRates r = fast_rates(v);
    return {r.am, r.bm, r.ah, r.bh, r.an, r.bn};
}

IonicCurrents ionic_currents(const HHState& s, double ca, const HHParams& p) {
    IonicCurrents c;
    c.i_na = p.g_na * s.m * s.m * s.m * s.h * (s.v - p.e_na);
    c.i_k = p.g_k * s.n * s.n * s.n * s.n * (s.v - p.e_k);
    c.i_l = p.g_l * (s.v - p.e_l);
    c.i_cak = p.g_cak * ca * (s.v - p.e_cak);
    return c;
}

HHState hh_rhs(const HHState& s, double ca, const HHParams& p) {
    if (!std::isfinite(s.v) || !std::isfinite(s.m) || !std::isfinite(s.h) ||
        !std::isfinite(s.n))
        throw InvalidStateError("hh_rhs: non-finite state component");
    const GatingRates r = gating_rates(s.v);
    const IonicCurrents c = ionic_currents(s, ca, p);
    HHState d;
    d.v = (p.i_ext - c.i_na - c.i_k - c.i_l - c.i_cak) / p.c_m;
    d.m = r.alpha_m * (1.0 - s.m) - r.beta_m * s.m;
    d.h = r.alpha_h * (1.0 - s.h) - r.beta_h * s.h;
    d.n = r.alpha_n * (1.0 - s.n) - r.beta_n * s.n;
    return d;
}

HHState hh_rest_state(double v) {
    const GatingRates r = gating_rates(v);
    return {v, r.alpha_m / (r.alpha_m + r.beta_m),
            r.alpha_h / (r.alpha_h + r.beta_h),
            r.alpha_n / (r.alpha_n + r.beta_n)};
}

void simulate_neuron_stream(const CascadeTrajectory& ca,
                            const HHParams& p,
                            double t_end_s,
                            double dt_hh_ms,
                            const HHState& init,
                            SampleSink& sink) {
    p.validate();
    if (!(dt_hh_ms > 0.0) || !(t_end_s >= 0.0) || !std::isfinite(t_end_s))
        throw InvalidStateError("simulate_neuron: need dt_hh_ms > 0 and finite t_end_s >= 0");
    if (!std::isfinite(init.v) || init.m < 0.0 || init.m > 1.0 || init.h < 0.0 ||
        init.h > 1.0 || init.n < 0.0 || init.n > 1.0)
        throw InvalidStateError("simulate_neuron: initial gates must lie in [0,1], v finite");

    const CaView cav(ca);
    const double h_ms = dt_hh_ms;
    const double h_s = dt_hh_ms * 1e-3;
    const auto n_steps =
        static_cast<std::size_t>(std::ceil(t_end_s / h_s - 1e-9));

    double y[4] = {init.v, init.m, init.h, init.n};
    sink.on_sample(0.0, y[0]);

    const double inv_cm = 1.0 / p.c_m;
    double ca_lo = cav.at(0.0);
    double k1[4], k2[4], k3[4], k4[4], tmp[4];

    for (std::size_t i = 0; i < n_steps; ++i) {
        const double t_s = static_cast<double>(i) * h_s;
        const double t_next = static_cast<double>(i + 1) * h_s;
        const double ca_mid = cav.at(t_s + 0.5 * h_s);
        const double ca_hi = cav.at(t_next);

        rhs_fast(y, ca_lo, p, inv_cm, k1);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h_ms * k1[j];
        rhs_fast(tmp, ca_mid, p, inv_cm, k2);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + 0.5 * h_ms * k2[j];
        rhs_fast(tmp, ca_mid, p, inv_cm, k3);
        for (int j = 0; j < 4; ++j) tmp[j] = y[j] + h_ms * k3[j];
        rhs_fast(tmp, ca_hi, p, inv_cm, k4);

        const double w = h_ms / 6.0;
        for (int j = 0; j < 4; ++j)
            y[j] += w * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);

        for (int j = 1; j < 4; ++j) {
            if (y[j] < 0.0) y[j] = 0.0;
            if (y[j] > 1.0) y[j] = 1.0;
        }
        if (!(y[0] >= -200.0 && y[0] <= 200.0))
            throw DivergenceError(
                "neuron", t_next,
                "membrane potential left [-200, 200] mV at t = " +
                    std::to_string(t_next) + " s");

        sink.on_sample(t_next, y[0]);
        ca_lo = ca_hi;
    }
}

namespace {

class FullRecorder : public SampleSink {
  public:
    explicit FullRecorder(std::size_t expect) {
        trace.t.reserve(expect);
        trace.v.reserve(expect);
    }
    void on_sample(double t_s, double v_mv) override {
        trace.t.push_back(t_s);
        trace.v.push_back(v_mv);
    }
    VoltageTrace trace;
};

}  // namespace

VoltageTrace simulate_neuron(const CascadeTrajectory& ca,
                             const HHParams& p,
                             double t_end_s,
                             double dt_hh_ms,
                             const HHState& init) {
    const auto expect =
        static_cast<std::size_t>(t_end_s / (dt_hh_ms * 1e-3)) + 2;
    FullRecorder rec(expect);
    simulate_neuron_stream(ca, p, t_end_s, dt_hh_ms, init, rec);
    return std::move(rec.trace);
}

void SpikeDetector::on_sample(double t_s, double v_mv) {
    if (has_prev_ && v_prev_ < v_th_ && v_mv >= v_th_) {
        const double tc =
            t_prev_ + (t_s - t_prev_) * ((v_th_ - v_prev_) / (v_mv - v_prev_));
        if (spikes_.empty() || tc - spikes_.back() >= refractory_s_)
            spikes_.push_back(tc);
    }
    t_prev_ = t_s;
    v_prev_ = v_mv;
    has_prev_ = true;
}

std::vector<double> detect_spikes(const VoltageTrace& trace,
                                  double v_th_mv,
                                  double refractory_ms) {
    SpikeDetector det(v_th_mv, refractory_ms);
    for (std::size_t i = 0; i < trace.t.size(); ++i)
        det.on_sample(trace.t[i], trace.v[i]);
    return det.take_spikes();
}

}  // namespace vagus
