#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "vagus/errors.hpp"
#include "vagus/metrics.hpp"
#include "vagus/rng.hpp"

using namespace vagus;

TEST_SUITE_BEGIN("metrics");

TEST_CASE("binarize_events basic pattern") {
    const auto seq = binarize_events({0.5, 0.7, 3.2}, 0.0, 5.0, 1.0);
    REQUIRE(seq.bits.size() == 5);
    const std::vector<std::uint8_t> want{1, 0, 0, 1, 0};
    CHECK(std::equal(seq.bits.begin(), seq.bits.end(), want.begin()));
}

TEST_CASE("binarize_events bin count and edges") {
    CHECK(binarize_events({}, 0.0, 200.0, 1.0).bits.size() == 200);
    CHECK(binarize_events({}, 0.0, 5.5, 1.0).bits.size() == 6);
    CHECK(binarize_events({}, 0.0, 0.0, 1.0).bits.empty());

    // An event exactly at t_end lands in the last bin instead of vanishing.
    const auto seq = binarize_events({5.0}, 0.0, 5.0, 1.0);
    CHECK(seq.bits.back() == 1);

    // Events outside [t_start, t_end] are ignored.
    const auto seq2 = binarize_events({-0.1, 5.1}, 0.0, 5.0, 1.0);
    CHECK(std::count(seq2.bits.begin(), seq2.bits.end(), 1) == 0);

    CHECK_THROWS_AS(binarize_events({}, 0.0, 1.0, 0.0), InvalidStateError);
    CHECK_THROWS_AS(binarize_events({}, 1.0, 0.0, 1.0), InvalidStateError);
}

TEST_CASE("joint_probabilities counts cells") {
    BinarySequence x, y;
    x.bits = {1, 0, 1, 0};
    y.bits = {0, 1, 0, 1};
    const auto t = joint_probabilities(x, y);
    CHECK(t.p[1][0] == doctest::Approx(0.5));
    CHECK(t.p[0][1] == doctest::Approx(0.5));
    CHECK(t.p[0][0] == 0.0);
    CHECK(t.p[1][1] == 0.0);
}

TEST_CASE("joint_probabilities alignment errors") {
    BinarySequence x, y;
    x.bits = {1, 0};
    y.bits = {1, 0, 1};
    CHECK_THROWS_AS(joint_probabilities(x, y), AlignmentError);
    y.bits = {1, 0};
    y.bin_width = 2.0;
    CHECK_THROWS_AS(joint_probabilities(x, y), AlignmentError);
    // differing t_start is fine (shifted-grid diagnostics rely on it)
    y.bin_width = 1.0;
    y.t_start = 0.5;
    CHECK_NOTHROW(joint_probabilities(x, y));
}

TEST_CASE("mutual information of independent and identical sequences") {
    BinarySequence x, y;
    x.bits = {1, 1, 0, 0};
    y.bits = {1, 0, 1, 0};
    CHECK(mutual_information(joint_probabilities(x, y)) ==
          doctest::Approx(0.0).epsilon(1e-12));

    // identical fair coin: MI = 1 bit
    BinarySequence z;
    z.bits = {1, 0, 1, 0, 0, 1};
    CHECK(mutual_information(joint_probabilities(z, z)) == doctest::Approx(1.0));
}

TEST_CASE("mutual information handles zero marginals") {
    BinarySequence x, y;
    x.bits = {0, 0, 0, 0};
    y.bits = {1, 0, 1, 1};
    CHECK(mutual_information(joint_probabilities(x, y)) == 0.0);
}

TEST_CASE("joint table validation") {
    JointTable t;
    t.p[0][0] = 0.5;
    t.p[1][1] = 0.5;
    CHECK_NOTHROW(t.validate());
    t.p[1][1] = 0.6;
    CHECK_THROWS_AS(t.validate(), InvalidStateError);
    t.p[1][1] = -0.1;
    CHECK_THROWS_AS(t.validate(), InvalidStateError);
}

TEST_CASE("MI on random tables: direct formula, symmetry, bounds") {
    Rng rng(123);
    for (int trial = 0; trial < 200; ++trial) {
        double raw[4], sum = 0.0;
        for (double& v : raw) {
            v = rng.uniform01() + 1e-6;
            sum += v;
        }
        JointTable t;
        t.p[0][0] = raw[0] / sum;
        t.p[0][1] = raw[1] / sum;
        t.p[1][0] = raw[2] / sum;
        // force exact unit total so validation cannot trip on rounding
        t.p[1][1] = 1.0 - t.p[0][0] - t.p[0][1] - t.p[1][0];

        // direct four-term evaluation
        const double px0 = t.p[0][0] + t.p[0][1], px1 = t.p[1][0] + t.p[1][1];
        const double py0 = t.p[0][0] + t.p[1][0], py1 = t.p[0][1] + t.p[1][1];
        double direct = 0.0;
        direct += t.p[0][0] * std::log2(t.p[0][0] / (px0 * py0));
        direct += t.p[0][1] * std::log2(t.p[0][1] / (px0 * py1));
        direct += t.p[1][0] * std::log2(t.p[1][0] / (px1 * py0));
        direct += t.p[1][1] * std::log2(t.p[1][1] / (px1 * py1));

        const double mi = mutual_information(t);
        CHECK(mi == doctest::Approx(direct).epsilon(1e-12));

        JointTable tt;
        tt.p[0][0] = t.p[0][0];
        tt.p[0][1] = t.p[1][0];
        tt.p[1][0] = t.p[0][1];
        tt.p[1][1] = t.p[1][1];
        CHECK(mutual_information(tt) == doctest::Approx(mi).epsilon(1e-12));

        const auto [hx, hy] = marginal_entropies(t);
        CHECK(mi >= 0.0);
        CHECK(mi <= std::min(hx, hy) + 1e-12);
    }
}

TEST_CASE("compute_delays basics") {
    const auto d = compute_delays({1.0, 3.0}, {1.5, 10.0});
    REQUIRE(d.delays.size() == 2);
    CHECK(d.delays[0] == doctest::Approx(0.5));
    CHECK(d.delays[1] == doctest::Approx(7.0));
    CHECK(*d.mean == doctest::Approx(3.75));
    CHECK(d.std_dev.has_value());

    // coincident peak and release: zero delay
    const auto z = compute_delays({2.0}, {2.0});
    REQUIRE(z.delays.size() == 1);
    CHECK(z.delays[0] == 0.0);
    CHECK(z.mean.has_value());
    CHECK_FALSE(z.std_dev.has_value());  // single sample: std undefined

    // peak after all releases is excluded
    const auto e = compute_delays({5.0}, {1.0});
    CHECK(e.delays.empty());
    CHECK_FALSE(e.mean.has_value());
    CHECK_FALSE(e.std_dev.has_value());
}

TEST_CASE("compute_delays rejects unsorted input") {
    CHECK_THROWS_AS(compute_delays({3.0, 1.0}, {}), OrderingError);
    CHECK_THROWS_AS(compute_delays({1.0}, {5.0, 2.0}), OrderingError);
}

TEST_CASE("compute_delays matches exhaustive search on random instances") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> peaks, rels;
        const int np = static_cast<int>(rng.uniform01() * 8);
        const int nr = static_cast<int>(rng.uniform01() * 8);
        for (int i = 0; i < np; ++i) peaks.push_back(rng.uniform01() * 100.0);
        for (int i = 0; i < nr; ++i) rels.push_back(rng.uniform01() * 100.0);
        std::sort(peaks.begin(), peaks.end());
        std::sort(rels.begin(), rels.end());

        std::vector<double> want;
        for (double tp : peaks) {
            double bestv = 1e300;
            bool found = false;
            for (double tr : rels)
                if (tr >= tp && tr < bestv) {
                    bestv = tr;
                    found = true;
                }
            if (found) want.push_back(bestv - tp);
        }
        const auto got = compute_delays(peaks, rels);
        REQUIRE(got.delays.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(got.delays[i] == want[i]);
            CHECK(got.delays[i] >= 0.0);
        }
    }
}

TEST_SUITE_END();
