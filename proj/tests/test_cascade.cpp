#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "vagus/cascade.hpp"
#include "vagus/errors.hpp"
#include "vagus/rng.hpp"

using namespace vagus;

namespace {

// Explicit constants for oracle checks, independent of the calibrated
// defaults so the tests pin the equations rather than the operating point.
CascadeParams toy_params() {
    CascadeParams p;
    p.k1 = 1.5;
    p.k2 = 0.5;
    p.k3 = 2.0;
    p.k4 = 1.0;
    p.k5 = 0.25;
    p.k6 = 2.0;
    p.k7 = 0.75;
    p.k8 = 1.5;
    p.k9 = 1.0;
    p.k10 = 2.0;
    p.k11 = 4.0;
    p.k12 = 0.01;
    p.k13 = 0.02;
    p.k14 = 1.0;
    p.k15 = 0.5;
    p.k16 = 0.8;
    p.k17 = 0.1;
    return p;
}

CascadeTrajectory synthetic_ca(const std::vector<double>& ca, double dt) {
    CascadeTrajectory traj;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        traj.t.push_back(static_cast<double>(i) * dt);
        traj.g_alpha.push_back(0.0);
        traj.plc.push_back(0.0);
        traj.ca_c.push_back(ca[i]);
        traj.ca_er.push_back(0.0);
    }
    return traj;
}

// Independent restatement of the detector contract: strict interior maxima
// above the floor, then greedy tallest-first thinning by separation.
std::vector<double> reference_peaks(const CascadeTrajectory& traj,
                                    const PeakConfig& cfg) {
    const auto& c = traj.ca_c;
    std::vector<std::size_t> cand;
    for (std::size_t i = 1; i + 1 < c.size(); ++i)
        if (c[i] > c[i - 1] && c[i] > c[i + 1] && c[i] > cfg.min_height)
            cand.push_back(i);
    std::vector<std::size_t> by_height(cand);
    std::stable_sort(by_height.begin(), by_height.end(),
                     [&c](std::size_t a, std::size_t b) { return c[a] > c[b]; });
    std::vector<std::size_t> kept;
    for (std::size_t idx : by_height) {
        bool ok = true;
        for (std::size_t k : kept)
            if (std::abs(traj.t[idx] - traj.t[k]) < cfg.min_separation) ok = false;
        if (ok) kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<double> out;
    for (std::size_t i : kept) out.push_back(traj.t[i]);
    return out;
}

}  // namespace

TEST_SUITE_BEGIN("cascade");

TEST_CASE("rhs at the origin is pure drive") {
    const auto d = cascade_rhs(CascadeState{0.0, 0.0, 0.0, 0.0}, toy_params());
    CHECK(d.g_alpha == 1.5);
    CHECK(d.plc == 0.0);
    CHECK(d.ca_c == 0.0);
    CHECK(d.ca_er == 0.0);
}

TEST_CASE("rhs term structure at sparse states") {
    const auto p = toy_params();
    // no receptor or calcium: PLC decays saturably, leaks into cytosol
    const auto d = cascade_rhs(CascadeState{0.0, 0.2, 0.0, 1.5}, p);
    CHECK(d.g_alpha == 1.5);
    CHECK(d.plc == doctest::Approx(-p.k8 * 0.2 / (0.2 + p.k9)).epsilon(1e-15));
    CHECK(d.ca_c == doctest::Approx(p.k12 * 0.2).epsilon(1e-15));
    CHECK(d.ca_er == 0.0);
}

TEST_CASE("rhs against frozen reference values") {
    const auto d = cascade_rhs(CascadeState{0.3, 0.2, 0.5, 1.5}, toy_params());
    CHECK(d.g_alpha == doctest::Approx(1.5413879598662208).epsilon(1e-14));
    CHECK(d.plc == doctest::Approx(-0.025000000000000078).epsilon(1e-13));
    CHECK(d.ca_c == doctest::Approx(-1.1041212121212123).epsilon(1e-14));
    CHECK(d.ca_er == doctest::Approx(0.6121212121212122).epsilon(1e-14));
}

TEST_CASE("store exchange cancels in the calcium sum") {
    // d(ca_c) + d(ca_er) must equal leak + feed - extrusion: the store terms
    // are internal transfers
    const auto p = toy_params();
    Rng rng(42);
    for (int i = 0; i < 100; ++i) {
        const CascadeState s{4.0 * rng.uniform01(), 2.0 * rng.uniform01(),
                             3.0 * rng.uniform01(), 10.0 * rng.uniform01()};
        const auto d = cascade_rhs(s, p);
        const double direct = p.k12 * s.plc + p.k13 * s.g_alpha -
                              p.k14 * s.ca_c / (s.ca_c + p.k15);
        CHECK(d.ca_c + d.ca_er == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
    }
}

TEST_CASE("rhs rejects non-finite states") {
    const auto p = toy_params();
    CHECK_THROWS_AS(cascade_rhs(CascadeState{std::nan(""), 0.0, 0.0, 0.0}, p),
                    InvalidStateError);
    CHECK_THROWS_AS(
        cascade_rhs(CascadeState{0.0, 0.0, std::numeric_limits<double>::infinity(), 0.0}, p),
        InvalidStateError);
}

TEST_CASE("parameter validation") {
    auto p = toy_params();
    p.k4 = 0.0;  // half-saturation must be strictly positive
    CHECK_THROWS_AS(p.validate(), InvalidStateError);
    p = toy_params();
    p.k10 = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidStateError);
    p = toy_params();
    p.k1 = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(p.validate(), InvalidStateError);
    CHECK_NOTHROW(toy_params().validate());
    CHECK_NOTHROW(CascadeParams{}.validate());
}

TEST_CASE("rhs matches a central difference along the flow") {
    const auto p = toy_params();
    const CascadeState init{0.3, 0.2, 0.5, 1.5};
    const double h = 1e-6;
    const auto traj = integrate_cascade(init, p, 2.0 * h, h);
    REQUIRE(traj.size() == 3);
    const auto d = cascade_rhs(traj.state(1), p);
    const double inv = 1.0 / (2.0 * h);
    CHECK((traj.g_alpha[2] - traj.g_alpha[0]) * inv ==
          doctest::Approx(d.g_alpha).epsilon(1e-6).scale(1e-3));
    CHECK((traj.plc[2] - traj.plc[0]) * inv ==
          doctest::Approx(d.plc).epsilon(1e-6).scale(1e-3));
    CHECK((traj.ca_c[2] - traj.ca_c[0]) * inv ==
          doctest::Approx(d.ca_c).epsilon(1e-6).scale(1e-3));
    CHECK((traj.ca_er[2] - traj.ca_er[0]) * inv ==
          doctest::Approx(d.ca_er).epsilon(1e-6).scale(1e-3));
}

TEST_CASE("time grid is uniform and inclusive of the endpoint") {
    const auto traj = integrate_cascade(CascadeState{}, toy_params(), 1.0, 1e-3);
    REQUIRE(traj.size() == 1001);
    for (std::size_t i = 0; i < traj.size(); ++i)
        CHECK(traj.t[i] == static_cast<double>(i) * 1e-3);
    CHECK(traj.t.back() == 1.0);
}

TEST_CASE("flat zero input stays exactly zero") {
    auto p = toy_params();
    p.k1 = 0.0;
    p.k2 = 0.0;
    const auto traj = integrate_cascade(CascadeState{0.0, 0.0, 0.0, 0.0}, p, 1.0, 1e-3);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.g_alpha[i] == 0.0);
        CHECK(traj.plc[i] == 0.0);
        CHECK(traj.ca_c[i] == 0.0);
        CHECK(traj.ca_er[i] == 0.0);
    }
}

TEST_CASE("integration is deterministic") {
    const auto a = integrate_cascade(CascadeState{}, CascadeParams{}, 5.0, 1e-3);
    const auto b = integrate_cascade(CascadeState{}, CascadeParams{}, 5.0, 1e-3);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.g_alpha[i] == b.g_alpha[i]);
        CHECK(a.plc[i] == b.plc[i]);
        CHECK(a.ca_c[i] == b.ca_c[i]);
        CHECK(a.ca_er[i] == b.ca_er[i]);
    }
}

TEST_CASE("trajectory stays non-negative and finite at the working point") {
    const auto traj = integrate_cascade(CascadeState{}, CascadeParams{}, 50.0, 1e-3);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        CHECK(traj.g_alpha[i] >= 0.0);
        CHECK(traj.plc[i] >= 0.0);
        CHECK(traj.ca_c[i] >= 0.0);
        CHECK(traj.ca_er[i] >= 0.0);
        CHECK(std::isfinite(traj.g_alpha[i]));
        CHECK(std::isfinite(traj.ca_er[i]));
    }
}

TEST_CASE("runaway drive raises a divergence error naming the stage") {
    auto p = toy_params();
    p.k1 = 1e9;
    try {
        integrate_cascade(CascadeState{}, p, 5.0, 1e-3);
        FAIL("expected DivergenceError");
    } catch (const DivergenceError& e) {
        CHECK(e.stage == "cascade");
        CHECK(e.t_fail > 0.0);
        CHECK(e.t_fail <= 5.0);
    }
}

TEST_CASE("step halving gains accuracy at fourth order") {
    const auto p = toy_params();
    const CascadeState init{0.3, 0.2, 0.5, 1.5};
    const double t_end = 2.0;
    auto at_end = [&](double dt) {
        const auto tr = integrate_cascade(init, p, t_end, dt);
        return tr.state(tr.size() - 1);
    };
    const auto ref = at_end(1e-4);
    auto err = [&](const CascadeState& s) {
        return std::max(std::max(std::abs(s.g_alpha - ref.g_alpha),
                                 std::abs(s.plc - ref.plc)),
                        std::max(std::abs(s.ca_c - ref.ca_c),
                                 std::abs(s.ca_er - ref.ca_er)));
    };
    const double e1 = err(at_end(8e-3));
    const double e2 = err(at_end(4e-3));
    CHECK(e1 / e2 >= 8.0);  // ideal RK4 ratio is 16
    CHECK(e2 < e1);
}

TEST_CASE("peak detection basics") {
    // two clean bumps over a 0.5 s grid
    std::vector<double> ca(41, 0.0);
    ca[10] = 1.0;  // t = 5
    ca[30] = 0.8;  // t = 15
    const auto traj = synthetic_ca(ca, 0.5);
    const auto pk = detect_ca_peaks(traj, PeakConfig{});
    REQUIRE(pk.size() == 2);
    CHECK(pk[0] == 5.0);
    CHECK(pk[1] == 15.0);
}

TEST_CASE("peak detection is strict about height and shape") {
    // plateau is not a strict maximum
    const auto flat = synthetic_ca({0.0, 1.0, 1.0, 0.0}, 1.0);
    CHECK(detect_ca_peaks(flat, PeakConfig{}).empty());

    // exactly at min_height is excluded, just above is kept
    const auto at = synthetic_ca({0.0, 0.5, 0.0}, 1.0);
    CHECK(detect_ca_peaks(at, PeakConfig{}).empty());
    const auto above = synthetic_ca({0.0, 0.5000001, 0.0}, 1.0);
    CHECK(detect_ca_peaks(above, PeakConfig{}).size() == 1);

    // endpoints cannot be peaks
    const auto edge = synthetic_ca({2.0, 1.0, 1.5}, 1.0);
    CHECK(detect_ca_peaks(edge, PeakConfig{}).empty());
}

TEST_CASE("peak thinning keeps the taller of close pairs") {
    // peaks at t=2 (0.9) and t=3 (1.1), separation 2.0: the taller survives
    const auto traj = synthetic_ca({0.0, 0.0, 0.9, 0.0, 1.1, 0.0}, 1.0);
    PeakConfig cfg;
    cfg.min_separation = 3.0;
    const auto pk = detect_ca_peaks(traj, cfg);
    REQUIRE(pk.size() == 1);
    CHECK(pk[0] == 4.0);

    // equal heights: the earlier peak wins the tie
    const auto tie = synthetic_ca({0.0, 1.0, 0.0, 1.0, 0.0}, 1.0);
    const auto pk2 = detect_ca_peaks(tie, cfg);
    REQUIRE(pk2.size() == 1);
    CHECK(pk2[0] == 1.0);
}

TEST_CASE("peak detection matches the reference rule on random signals") {
    Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> ca(200);
        for (double& v : ca) v = rng.uniform01();
        const auto traj = synthetic_ca(ca, 0.5);
        PeakConfig cfg;
        cfg.min_height = 0.5;
        cfg.min_separation = 2.0;
        const auto got = detect_ca_peaks(traj, cfg);
        const auto want = reference_peaks(traj, cfg);
        REQUIRE(got.size() == want.size());
        for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == want[i]);
        for (std::size_t i = 1; i < got.size(); ++i) {
            CHECK(got[i] > got[i - 1]);
            CHECK(got[i] - got[i - 1] >= cfg.min_separation);
        }
    }
}

TEST_SUITE_END();
