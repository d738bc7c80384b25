#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace vagus {

// Presence/absence of events per time bin.
struct BinarySequence {
    std::vector<std::uint8_t> bits;
    double bin_width = 1.0;  // s, > 0
    double t_start = 0.0;    // s
};

// Bit i covers [t_start + i*w, t_start + (i+1)*w). The bin count is
// ceil(span / w) with a tolerance so exact multiples do not gain a bin.
// An event landing exactly on the closing edge of the last bin is counted
// in the last bin rather than dropped.
BinarySequence binarize_events(const std::vector<double>& event_times,
                               double t_start,
                               double t_end,
                               double bin_width);

// Joint distribution of two aligned binary sequences. p[x][y] is the
// empirical frequency of (X = x, Y = y).
struct JointTable {
    double p[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

    // Entries finite, >= 0, summing to 1 within 1e-12.
    void validate() const;
};

// Empirical joint frequencies bin-by-bin. Sequences must have the same
// length and bin width (t_start may differ; shifted-grid diagnostics rely
// on that); otherwise AlignmentError.
JointTable joint_probabilities(const BinarySequence& x,
                               const BinarySequence& y);

// Mutual information in bits. Terms with a zero joint cell or zero marginal
// contribute zero. Values in [-1e-12, 0) from rounding are clamped to 0.
double mutual_information(const JointTable& table);

// Marginal entropies (H(X), H(Y)) in bits, for the MI upper-bound check.
std::pair<double, double> marginal_entropies(const JointTable& table);

// Per-peak transmission delays and their summary statistics.
struct DelayStats {
    std::vector<double> delays;       // s, one per matched peak, >= 0
    std::optional<double> mean;       // empty when no peak was matched
    std::optional<double> std_dev;    // sample std (N-1); empty when n < 2
};

// Delay of each calcium peak to the first release at or after it. Peaks with
// no following release are skipped. Both inputs must be sorted ascending;
// otherwise OrderingError.
DelayStats compute_delays(const std::vector<double>& peak_times,
                          const std::vector<double>& release_times);

}  // namespace vagus
