#include "vagus/metrics.hpp"

#include <cmath>

#include "vagus/errors.hpp"

namespace vagus {

BinarySequence binarize_events(const std::vector<double>& event_times,
                               double t_start,
                               double t_end,
                               double bin_width) {
    if (!(bin_width > 0.0))
        throw InvalidStateError("binarize_events: bin_width must be > 0");
    if (!(t_end >= t_start))
        throw InvalidStateError("binarize_events: need t_end >= t_start");

    const double span = t_end - t_start;
    const auto n_bins =
        static_cast<std::size_t>(std::ceil(span / bin_width - 1e-9));

    BinarySequence seq;
    seq.bin_width = bin_width;
    seq.t_start = t_start;
    seq.bits.assign(n_bins, 0);
    for (double t : event_times) {
        if (t < t_start || t > t_end || n_bins == 0) continue;
        auto i = static_cast<std::size_t>((t - t_start) / bin_width);
        if (i >= n_bins) i = n_bins - 1;  // closing-edge event, keep it
        seq.bits[i] = 1;
    }
    return seq;
}

void JointTable::validate() const {
    double sum = 0.0;
    for (const auto& row : p)
        for (double v : row) {
            if (!std::isfinite(v) || v < 0.0)
                throw InvalidStateError("joint table: entries must be finite and >= 0");
            sum += v;
        }
    if (std::abs(sum - 1.0) > 1e-12)
        throw InvalidStateError("joint table: entries must sum to 1");
}

JointTable joint_probabilities(const BinarySequence& x,
                               const BinarySequence& y) {
    if (x.bits.size() != y.bits.size())
        throw AlignmentError("joint_probabilities: sequences differ in length");
    if (x.bin_width != y.bin_width)
        throw AlignmentError("joint_probabilities: sequences differ in bin width");
    if (x.bits.empty())
        throw AlignmentError("joint_probabilities: sequences are empty");

    JointTable table;
    for (std::size_t i = 0; i < x.bits.size(); ++i)
        table.p[x.bits[i] ? 1 : 0][y.bits[i] ? 1 : 0] += 1.0;
    const double inv = 1.0 / static_cast<double>(x.bits.size());
    for (auto& row : table.p)
        for (double& v : row) v *= inv;
    return table;
}

double mutual_information(const JointTable& table) {
    table.validate();
    const double px[2] = {table.p[0][0] + table.p[0][1],
                          table.p[1][0] + table.p[1][1]};
    const double py[2] = {table.p[0][0] + table.p[1][0],
                          table.p[0][1] + table.p[1][1]};
    double mi = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            const double pij = table.p[i][j];
            if (pij <= 0.0 || px[i] <= 0.0 || py[j] <= 0.0) continue;
            mi += pij * std::log2(pij / (px[i] * py[j]));
        }
    if (mi < 0.0 && mi >= -1e-12) mi = 0.0;
    return mi;
}

std::pair<double, double> marginal_entropies(const JointTable& table) {
    table.validate();
    const double px[2] = {table.p[0][0] + table.p[0][1],
                          table.p[1][0] + table.p[1][1]};
    const double py[2] = {table.p[0][0] + table.p[1][0],
                          table.p[0][1] + table.p[1][1]};
    auto h = [](const double m[2]) {
        double s = 0.0;
        for (int i = 0; i < 2; ++i)
            if (m[i] > 0.0) s -= m[i] * std::log2(m[i]);
        return s;
    };
    return {h(px), h(py)};
}

DelayStats compute_delays(const std::vector<double>& peak_times,
                          const std::vector<double>& release_times) {
    for (std::size_t i = 1; i < peak_times.size(); ++i)
        if (peak_times[i] < peak_times[i - 1])
            throw OrderingError("compute_delays: peak times must be sorted ascending");
    for (std::size_t i = 1; i < release_times.size(); ++i)
        if (release_times[i] < release_times[i - 1])
            throw OrderingError("compute_delays: release times must be sorted ascending");

    DelayStats stats;
    std::size_t j = 0;
    for (double tp : peak_times) {
        while (j < release_times.size() && release_times[j] < tp) ++j;
        if (j == release_times.size()) break;  // no release follows this peak
        stats.delays.push_back(release_times[j] - tp);
    }
    const std::size_t n = stats.delays.size();
    if (n >= 1) {
        double sum = 0.0;
        for (double d : stats.delays) sum += d;
        stats.mean = sum / static_cast<double>(n);
        if (n >= 2) {
            double ss = 0.0;
            for (double d : stats.delays) {
                const double r = d - *stats.mean;
                ss += r * r;
            }
            stats.std_dev = std::sqrt(ss / static_cast<double>(n - 1));
        }
    }
    return stats;
}

}  // namespace vagus
