#pragma once

#include <cstddef>
#include <vector>

namespace vagus {

// Rate constants of the receptor -> PLC -> Ca(cytosol)/Ca(store) loop.
// Concentrations are uM, time is seconds. Defaults are the calibrated
// operating point used across tools and tests.
struct CascadeParams {
    double k1 = 2.68;           // uM/s   receptor drive (the swept input)
    double k2 = 0.5062260851;   // 1/s    G-protein self-amplification
    double k3 = 1.203173256;    // uM/s   PLC-mediated G-protein removal
    double k4 = 3.505109437;    // uM     half-saturation for k3 term
    double k5 = 0.08203236737;  // uM/s   Ca-mediated G-protein removal
    double k6 = 4.876498127;    // uM     half-saturation for k5 term
    double k7 = 0.226284077;    // 1/s    G-protein -> PLC activation
    double k8 = 3.133066093;    // uM/s   PLC deactivation (saturable)
    double k9 = 1.532440549;    // uM     half-saturation for k8 term
    double k10 = 0.3230910562;  // 1/(uM s)  store release, gated by PLC
    double k11 = 8.768155661;   // uM     half-saturation on store content
    double k12 = 0.002263418983;  // 1/s  PLC -> cytosol leak
    double k13 = 0.01692206233;   // 1/s  G-protein -> cytosol leak
    double k14 = 0.9403600211;  // uM/s   plasma-membrane Ca extrusion
    double k15 = 0.01958364368; // uM     half-saturation for extrusion
    double k16 = 0.3329115579;  // uM/s   store re-uptake (SERCA-like)
    double k17 = 0.03845816271; // uM     half-saturation for re-uptake

    // Throws InvalidStateError if any rate is non-finite/negative or any
    // half-saturation constant is not strictly positive.
    void validate() const;
};

// Instantaneous cascade state; also used as the derivative container
// (derivatives may be negative, states along a trajectory never are).
struct CascadeState {
    double g_alpha = 0.01;  // uM
    double plc = 0.01;      // uM
    double ca_c = 0.01;     // uM cytosolic free calcium
    double ca_er = 1.0;     // uM store calcium
};

struct CascadeTrajectory {
    std::vector<double> t;  // strictly increasing, uniform grid, seconds
    std::vector<double> g_alpha;
    std::vector<double> plc;
    std::vector<double> ca_c;
    std::vector<double> ca_er;

    std::size_t size() const { return t.size(); }
    CascadeState state(std::size_t i) const {
        return {g_alpha[i], plc[i], ca_c[i], ca_er[i]};
    }
};

// Exact right-hand side of the four-variable kinetics. Pure function.
// Throws InvalidStateError on non-finite state input.
CascadeState cascade_rhs(const CascadeState& s, const CascadeParams& p);

// Classic RK4 on a uniform grid from t = 0 to t_end (inclusive endpoint
// within grid resolution). Small negative undershoots in [-1e-9, 0) are
// clamped to zero after each step; anything below -1e-9 or non-finite
// raises DivergenceError naming the failure time.
CascadeTrajectory integrate_cascade(const CascadeState& init,
                                    const CascadeParams& p,
                                    double t_end,
                                    double dt = 1e-3);

struct PeakConfig {
    double min_height = 0.5;     // uM, peaks must exceed this strictly
    double min_separation = 2.0; // s, between retained peaks
};

// Times of strict local maxima of ca_c above min_height, thinned so that
// retained peaks are >= min_separation apart (taller peaks win ties).
// Result is sorted ascending.
std::vector<double> detect_ca_peaks(const CascadeTrajectory& traj,
                                    const PeakConfig& cfg);

}  // namespace vagus
