#include "vagus/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vagus/errors.hpp"

namespace vagus {

namespace {

bool finite_state(const CascadeState& s) {
    return std::isfinite(s.g_alpha) && std::isfinite(s.plc) &&
           std::isfinite(s.ca_c) && std::isfinite(s.ca_er);
}

// RHS without the input-validation wrapper; the integrator has already
// guaranteed a finite state and validated params.
inline CascadeState rhs_raw(const CascadeState& s, const CascadeParams& p) {
    const double A = s.g_alpha, B = s.plc, C = s.ca_c, E = s.ca_er;
    const double store_flux = p.k10 * C * B * E / (E + p.k11);
    CascadeState d;
    d.g_alpha = p.k1 + p.k2 * A - p.k3 * A * B / (A + p.k4) -
                p.k5 * A * C / (A + p.k6);
    d.plc = p.k7 * A - p.k8 * B / (B + p.k9);
    d.ca_c = store_flux + p.k12 * B + p.k13 * A - p.k14 * C / (C + p.k15) -
             p.k16 * C / (C + p.k17);
    d.ca_er = -store_flux + p.k16 * C / (C + p.k17);
    return d;
}

}  // namespace

void CascadeParams::validate() const {
    const double rates[] = {k1, k2, k3, k5, k7, k8, k10, k12, k13, k14, k16};
    for (double r : rates)
        if (!std::isfinite(r) || r < 0.0)
            throw InvalidStateError("cascade params: rate constants must be finite and >= 0");
    const double halfs[] = {k4, k6, k9, k11, k15, k17};
    for (double h : halfs)
        if (!std::isfinite(h) || h <= 0.0)
            throw InvalidStateError("cascade params: half-saturation constants must be > 0");
}

CascadeState cascade_rhs(const CascadeState& s, const CascadeParams& p) {
    if (!finite_state(s))
        throw InvalidStateError("cascade_rhs: non-finite state component");
    return rhs_raw(s, p);
}

CascadeTrajectory integrate_cascade(const CascadeState& init,
                                    const CascadeParams& p,
                                    double t_end,
                                    double dt) {
    p.validate();
    if (!(dt > 0.0) || !(t_end >= 0.0) || !std::isfinite(t_end))
        throw InvalidStateError("integrate_cascade: need dt > 0 and finite t_end >= 0");
    if (!finite_state(init))
        throw InvalidStateError("integrate_cascade: non-finite initial state");

    // Guard against float drift when t_end is an exact multiple of dt.
    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));

    CascadeTrajectory traj;
    traj.t.reserve(n_steps + 1);
    traj.g_alpha.reserve(n_steps + 1);
    traj.plc.reserve(n_steps + 1);
    traj.ca_c.reserve(n_steps + 1);
    traj.ca_er.reserve(n_steps + 1);

    auto push = [&traj](double t, const CascadeState& s) {
        traj.t.push_back(t);
        traj.g_alpha.push_back(s.g_alpha);
        traj.plc.push_back(s.plc);
        traj.ca_c.push_back(s.ca_c);
        traj.ca_er.push_back(s.ca_er);
    };

    CascadeState y = init;
    push(0.0, y);

    for (std::size_t i = 0; i < n_steps; ++i) {
        const CascadeState k1 = rhs_raw(y, p);
        CascadeState m{y.g_alpha + 0.5 * dt * k1.g_alpha, y.plc + 0.5 * dt * k1.plc,
                       y.ca_c + 0.5 * dt * k1.ca_c, y.ca_er + 0.5 * dt * k1.ca_er};
        const CascadeState k2 = rhs_raw(m, p);
        m = {y.g_alpha + 0.5 * dt * k2.g_alpha, y.plc + 0.5 * dt * k2.plc,
             y.ca_c + 0.5 * dt * k2.ca_c, y.ca_er + 0.5 * dt * k2.ca_er};
        const CascadeState k3 = rhs_raw(m, p);
        m = {y.g_alpha + dt * k3.g_alpha, y.plc + dt * k3.plc,
             y.ca_c + dt * k3.ca_c, y.ca_er + dt * k3.ca_er};
        const CascadeState k4 = rhs_raw(m, p);

        const double w = dt / 6.0;
        y.g_alpha += w * (k1.g_alpha + 2.0 * k2.g_alpha + 2.0 * k3.g_alpha + k4.g_alpha);
        y.plc += w * (k1.plc + 2.0 * k2.plc + 2.0 * k3.plc + k4.plc);
        y.ca_c += w * (k1.ca_c + 2.0 * k2.ca_c + 2.0 * k3.ca_c + k4.ca_c);
        y.ca_er += w * (k1.ca_er + 2.0 * k2.ca_er + 2.0 * k3.ca_er + k4.ca_er);

        const double t_next = static_cast<double>(i + 1) * dt;
        for (double* comp : {&y.g_alpha, &y.plc, &y.ca_c, &y.ca_er}) {
            if (!std::isfinite(*comp) || *comp < -1e-9)
                throw DivergenceError(
                    "cascade", t_next,
                    "cascade integration diverged at t = " + std::to_string(t_next) + " s");
            if (*comp < 0.0) *comp = 0.0;  // integrator undershoot, not physics
        }
        push(t_next, y);
    }
    return traj;
}

std::vector<double> detect_ca_peaks(const CascadeTrajectory& traj,
                                    const PeakConfig& cfg) {
    if (!(cfg.min_separation >= 0.0))
        throw InvalidStateError("detect_ca_peaks: min_separation must be >= 0");
    const auto& c = traj.ca_c;
    const std::size_t n = c.size();

    // Strict local maxima above the height floor.
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < n; ++i)
        if (c[i] > c[i - 1] && c[i] > c[i + 1] && c[i] > cfg.min_height)
            cand.push_back(i);

    // Thin by height: keep the tallest, drop anything within min_separation,
    // repeat. Matches the usual prominence-free peak-picker semantics.
    std::vector<std::size_t> by_height(cand);
    std::stable_sort(by_height.begin(), by_height.end(),
                     [&c](std::size_t a, std::size_t b) { return c[a] > c[b]; });
    std::vector<bool> alive(cand.size(), true);
    std::vector<std::size_t> kept;
    for (std::size_t idx : by_height) {
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(cand.begin(), cand.end(), idx) - cand.begin());
        if (!alive[pos]) continue;
        kept.push_back(idx);
        for (std::size_t j = 0; j < cand.size(); ++j) {
            if (!alive[j] || cand[j] == idx) continue;
            if (std::abs(traj.t[cand[j]] - traj.t[idx]) < cfg.min_separation)
                alive[j] = false;
        }
    }
    std::vector<double> times;
    times.reserve(kept.size());
    std::sort(kept.begin(), kept.end());
    for (std::size_t i : kept) times.push_back(traj.t[i]);
    return times;
}

}  // namespace vagus
