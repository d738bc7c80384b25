#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "vagus/errors.hpp"
#include "vagus/pipeline.hpp"

using namespace vagus;

namespace {

TrialConfig short_config(std::uint64_t seed = 7) {
    TrialConfig cfg;
    cfg.t_end_s = 3.0;
    cfg.seed = seed;
    return cfg;
}

bool same_vector(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return false;
    return true;
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("identical configs give identical trials") {
    const auto a = run_trial(short_config());
    const auto b = run_trial(short_config());
    CHECK(same_vector(a.spikes, b.spikes));
    CHECK(same_vector(a.ca_peaks, b.ca_peaks));
    CHECK(same_vector(a.releases, b.releases));
    CHECK(same_vector(a.voltage.t, b.voltage.t));
    CHECK(same_vector(a.voltage.v, b.voltage.v));
    CHECK(same_vector(a.cascade.ca_c, b.cascade.ca_c));
    REQUIRE(a.events.size() == b.events.size());
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].t == b.events[i].t);
        CHECK(a.events[i].vesicles == b.events[i].vesicles);
    }
}

TEST_CASE("the seed drives only the release stage") {
    const auto a = run_trial(short_config(7));
    const auto b = run_trial(short_config(8));
    CHECK(same_vector(a.spikes, b.spikes));
    CHECK(same_vector(a.ca_peaks, b.ca_peaks));
    CHECK(same_vector(a.voltage.v, b.voltage.v));
    CHECK(same_vector(a.cascade.ca_c, b.cascade.ca_c));
    REQUIRE(a.events.size() == b.events.size());
    bool any_diff = false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        CHECK(a.events[i].t == b.events[i].t);  // times come from spikes
        if (a.events[i].vesicles != b.events[i].vesicles) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("no receptor drive: tonic firing, releases, zero peaks") {
    auto cfg = short_config();
    cfg.cascade.k1 = 0.0;
    cfg.cascade.k2 = 0.0;
    cfg.initial_state = CascadeState{0.0, 0.0, 0.0, 0.0};
    const auto rec = run_trial(cfg);

    // cascade is identically zero
    for (double c : rec.cascade.ca_c) CHECK(c == 0.0);
    CHECK(rec.ca_peaks.empty());

    // the classical membrane fires tonically near 68 Hz
    CHECK(rec.spikes.size() >= 150);
    CHECK(rec.spikes.size() <= 250);

    // one event per spike; a 100-vesicle coin at p = 0.5 never comes up empty
    CHECK(rec.events.size() == rec.spikes.size());
    CHECK(rec.releases.size() == rec.spikes.size());

    const auto m = compute_trial_metrics(rec, cfg);
    CHECK(m.n_peaks == 0);
    CHECK(m.mi == 0.0);  // degenerate peak marginal carries no information
    CHECK(m.n_delays == 0);
    CHECK_FALSE(m.delay_mean.has_value());
}

TEST_CASE("events sit on spikes and inside the horizon") {
    const auto cfg = short_config();
    const auto rec = run_trial(cfg);
    REQUIRE(rec.events.size() == rec.spikes.size());
    for (std::size_t i = 0; i < rec.events.size(); ++i) {
        CHECK(rec.events[i].t == rec.spikes[i]);
        CHECK(rec.events[i].t >= 0.0);
        CHECK(rec.events[i].t <= cfg.t_end_s);
        CHECK(rec.events[i].vesicles >= 0);
        CHECK(rec.events[i].vesicles <= cfg.synapse.n_vesicles);
    }
    // releases are exactly the event times with at least one vesicle
    std::vector<double> want;
    for (const auto& e : rec.events)
        if (e.vesicles >= 1) want.push_back(e.t);
    CHECK(same_vector(rec.releases, want));
}

TEST_CASE("pipeline stages match the standalone components") {
    const auto cfg = short_config(21);
    const auto rec = run_trial(cfg);

    const auto traj = integrate_cascade(cfg.initial_state, cfg.cascade,
                                        cfg.t_end_s, cfg.dt_cascade_s);
    // default cadence stores the cascade at full resolution
    REQUIRE(rec.cascade.size() == traj.size());
    CHECK(same_vector(rec.cascade.ca_c, traj.ca_c));
    CHECK(same_vector(rec.cascade.t, traj.t));

    const auto pk = detect_ca_peaks(traj, cfg.peaks);
    CHECK(same_vector(rec.ca_peaks, pk));

    const auto vt = simulate_neuron(traj, cfg.hh, cfg.t_end_s, cfg.dt_hh_ms);
    const auto sp = detect_spikes(vt, cfg.synapse.v_th_mv, cfg.refractory_ms);
    CHECK(same_vector(rec.spikes, sp));

    Rng rng(cfg.seed);
    const auto syn = simulate_synapse(sp, cfg.synapse, rng, cfg.t_end_s,
                                      cfg.recorder.coarse_ms * 1e-3);
    REQUIRE(syn.events.size() == rec.events.size());
    for (std::size_t i = 0; i < syn.events.size(); ++i) {
        CHECK(syn.events[i].t == rec.events[i].t);
        CHECK(syn.events[i].vesicles == rec.events[i].vesicles);
    }
}

TEST_CASE("spike detection is independent of the recording cadence") {
    auto a = short_config();
    a.recorder.coarse_ms = 1.0;
    a.recorder.fine_ms = 0.1;
    auto b = short_config();
    b.recorder.coarse_ms = 5.0;
    b.recorder.fine_ms = 0.5;
    b.recorder.spike_window_ms = 2.0;
    const auto ra = run_trial(a);
    const auto rb = run_trial(b);
    CHECK(same_vector(ra.spikes, rb.spikes));
    CHECK(same_vector(ra.releases, rb.releases));
    CHECK(ra.voltage.t.size() > rb.voltage.t.size());
}

TEST_CASE("stored voltage grid is strictly increasing") {
    const auto rec = run_trial(short_config());
    REQUIRE(!rec.voltage.t.empty());
    for (std::size_t i = 1; i < rec.voltage.t.size(); ++i)
        CHECK(rec.voltage.t[i] > rec.voltage.t[i - 1]);
}

TEST_CASE("cascade decimation follows the coarse cadence") {
    auto cfg = short_config();
    cfg.recorder.coarse_ms = 2.0;  // stride 2 over the 1 ms cascade grid
    const auto rec = run_trial(cfg);
    const auto full = integrate_cascade(cfg.initial_state, cfg.cascade,
                                        cfg.t_end_s, cfg.dt_cascade_s);
    REQUIRE(rec.cascade.size() == (full.size() + 1) / 2);
    for (std::size_t i = 0; i < rec.cascade.size(); ++i) {
        CHECK(rec.cascade.t[i] == full.t[2 * i]);
        CHECK(rec.cascade.ca_c[i] == full.ca_c[2 * i]);
    }
}

TEST_CASE("metrics wiring on a handmade record") {
    TrialConfig cfg;
    cfg.t_end_s = 10.0;
    RunRecord rec;
    rec.ca_peaks = {1.2};
    rec.releases = {3.7, 8.1};
    rec.spikes = {3.7, 8.1};
    const auto m = compute_trial_metrics(rec, cfg);
    CHECK(m.n_peaks == 1);
    CHECK(m.n_releases == 2);
    CHECK(m.n_delays == 1);
    REQUIRE(m.delay_mean.has_value());
    CHECK(*m.delay_mean == doctest::Approx(2.5));
    CHECK_FALSE(m.delay_std.has_value());

    const auto x = binarize_events(rec.ca_peaks, 0.0, 10.0, 1.0);
    const auto y = binarize_events(rec.releases, 0.0, 10.0, 1.0);
    CHECK(m.mi == mutual_information(joint_probabilities(x, y)));
}

TEST_CASE("stage failures name the failing stage") {
    auto cfg = short_config();
    cfg.hh.i_ext = 1e6;
    try {
        run_trial(cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.stage == "neuron");
    }

    cfg = short_config();
    cfg.cascade.k1 = 1e9;
    try {
        run_trial(cfg);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.stage == "cascade");
    }
}

TEST_CASE("config validation rejects bad shapes") {
    auto cfg = short_config();
    cfg.bin_width_s = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidStateError);
    cfg = short_config();
    cfg.t_end_s = -1.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidStateError);
    cfg = short_config();
    cfg.initial_state.ca_er = -0.5;
    CHECK_THROWS_AS(cfg.validate(), InvalidStateError);
    cfg = short_config();
    cfg.recorder.fine_ms = 0.0;
    CHECK_THROWS_AS(cfg.validate(), InvalidStateError);
    CHECK_NOTHROW(short_config().validate());
}

TEST_SUITE_END();
