#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "io_detail.hpp"
#include "vagus/errors.hpp"
#include "vagus/io.hpp"

namespace vagus {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// %.17g round-trips doubles exactly; event times and metrics use it.
std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct File {
    std::FILE* f = nullptr;
    explicit File(const std::string& path) {
        f = std::fopen(path.c_str(), "wb");
        if (!f) throw SimError("io: cannot write \"" + path + "\"");
    }
    ~File() {
        if (f) std::fclose(f);
    }
    File(const File&) = delete;
    File& operator=(const File&) = delete;
};

void write_text(const std::string& path, const std::string& text) {
    File out(path);
    std::fwrite(text.data(), 1, text.size(), out.f);
}

// Dense trace files carry 12 significant digits: enough to reproduce every
// detection decision downstream while keeping long-run files compact.
void write_series_csv(const std::string& path, const char* header,
                      const std::vector<const std::vector<double>*>& cols) {
    File out(path);
    std::fprintf(out.f, "%s\n", header);
    const std::size_t n = cols.empty() ? 0 : cols[0]->size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c)
            std::fprintf(out.f, c + 1 == cols.size() ? "%.12g" : "%.12g,",
                         (*cols[c])[i]);
        std::fputc('\n', out.f);
    }
}

void write_times_csv(const std::string& path, const char* header,
                     const std::vector<double>& times) {
    File out(path);
    std::fprintf(out.f, "%s\n", header);
    for (double t : times) std::fprintf(out.f, "%.17g\n", t);
}

json metrics_json(const TrialMetrics& m) {
    json j;
    j["mi_bits_per_bin"] = m.mi;
    j["mi_half_bin_shift"] = m.mi_half_bin_shift;
    j["delay_mean_s"] = m.delay_mean ? json(*m.delay_mean) : json(nullptr);
    j["delay_std_s"] = m.delay_std ? json(*m.delay_std) : json(nullptr);
    j["n_delays"] = m.n_delays;
    return j;
}

std::vector<double> read_time_column(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SimError("io: cannot read \"" + path + "\"");
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        out.push_back(std::strtod(line.c_str(), nullptr));
    }
    return out;
}

}  // namespace

std::string trial_dir_name(std::size_t median_index, std::size_t trial_index) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "m%02zu_t%04zu", median_index, trial_index);
    return buf;
}

void write_trial_dir(const std::string& dir,
                     const TrialConfig& cfg,
                     const RunRecord& rec,
                     const TrialMetrics& metrics,
                     double wall_ms,
                     TraceStorage storage) {
    fs::create_directories(dir);

    json man;
    man["schema"] = "trial/1";
    man["status"] = "ok";
    man["config"] = detail::trial_config_json(cfg);
    man["counts"] = {{"peaks", rec.ca_peaks.size()},
                     {"spikes", rec.spikes.size()},
                     {"events", rec.events.size()},
                     {"releases", rec.releases.size()}};
    man["metrics"] = metrics_json(metrics);
    man["wall_time_ms"] = wall_ms;
    write_text(dir + "/manifest.json", man.dump(2) + "\n");

    write_times_csv(dir + "/spikes.csv", "t_spike", rec.spikes);
    write_times_csv(dir + "/peaks.csv", "t_peak", rec.ca_peaks);
    {
        File out(dir + "/releases.csv");
        std::fprintf(out.f, "t_event,k,delta_nt\n");
        for (const auto& e : rec.events)
            std::fprintf(out.f, "%.17g,%d,%.17g\n", e.t, e.vesicles, e.delta_nt);
    }
    if (storage == TraceStorage::traces) {
        write_series_csv(dir + "/cascade.csv", "t,g_alpha,plc,ca_c,ca_er",
                         {&rec.cascade.t, &rec.cascade.g_alpha, &rec.cascade.plc,
                          &rec.cascade.ca_c, &rec.cascade.ca_er});
        write_series_csv(dir + "/voltage.csv", "t,v_m",
                         {&rec.voltage.t, &rec.voltage.v});
        write_series_csv(dir + "/nt.csv", "t,nt", {&rec.nt.t, &rec.nt.nt});
    }
}

void write_failed_trial_dir(const std::string& dir,
                            const TrialConfig& cfg,
                            const std::string& stage,
                            double fail_time_s,
                            double wall_ms) {
    fs::create_directories(dir);
    json man;
    man["schema"] = "trial/1";
    man["status"] = "diverged";
    man["fail_stage"] = stage;
    man["fail_time_s"] = fail_time_s;
    man["config"] = detail::trial_config_json(cfg);
    man["wall_time_ms"] = wall_ms;
    write_text(dir + "/manifest.json", man.dump(2) + "\n");
}

namespace {

json trial_row_json(const TrialRow& r) {
    json j;
    j["median_index"] = r.median_index;
    j["trial_index"] = r.trial_index;
    j["k1"] = r.k1;
    j["seed"] = r.seed;
    j["status"] = r.status;
    j["fail_stage"] = r.fail_stage;
    j["fail_time_s"] = r.fail_time_s;
    j["dir"] = r.dir;
    j["peaks"] = r.metrics.n_peaks;
    j["spikes"] = r.metrics.n_spikes;
    j["releases"] = r.metrics.n_releases;
    j["mi_bits_per_bin"] = r.metrics.mi;
    j["mi_half_bin_shift"] = r.metrics.mi_half_bin_shift;
    j["delay_mean_s"] =
        r.metrics.delay_mean ? json(*r.metrics.delay_mean) : json(nullptr);
    j["delay_std_s"] =
        r.metrics.delay_std ? json(*r.metrics.delay_std) : json(nullptr);
    j["n_delays"] = r.metrics.n_delays;
    return j;
}

json summary_row_json(const SweepRow& r) {
    json j;
    j["k1_median"] = r.k1_median;
    j["mi_mean"] = r.mi_mean;
    j["mi_std"] = r.mi_std ? json(*r.mi_std) : json(nullptr);
    j["delay_mean"] = r.delay_mean ? json(*r.delay_mean) : json(nullptr);
    j["delay_std"] = r.delay_std ? json(*r.delay_std) : json(nullptr);
    j["spikes_mean"] = r.spikes_mean;
    j["peaks_mean"] = r.peaks_mean;
    j["releases_mean"] = r.releases_mean;
    return j;
}

// Published operating points the endpoint runs are compared against.
json reference_targets_json() {
    json j;
    j["k1_endpoints"] = {1.52, 3.82};
    j["mi_bits_per_bin"] = {0.0085, 0.0110};
    j["delay_mean_s"] = {9.40, 7.99};
    j["delay_std_s"] = {4.44, 3.57};
    return j;
}

std::string csv_field(std::optional<double> v) {
    return v ? g17(*v) : "nan";
}

}  // namespace

void write_sweep_manifest(const SweepConfig& cfg, const SweepSummary& summary) {
    fs::create_directories(cfg.output_dir);
    json man;
    man["schema"] = "sweep-manifest/1";
    man["total"] = summary.n_total;
    man["failed"] = summary.n_failed;
    json rows = json::array();
    for (const auto& r : summary.trials) rows.push_back(trial_row_json(r));
    man["trials"] = std::move(rows);
    write_text(cfg.output_dir + "/manifest.json", man.dump(2) + "\n");
}

void write_sweep_outputs(const SweepConfig& cfg, const SweepSummary& summary) {
    fs::create_directories(cfg.output_dir);

    json sum;
    sum["schema"] = "sweep-summary/1";
    sum["config"] = detail::sweep_config_json(cfg);
    sum["reference_targets"] = reference_targets_json();
    json rows = json::array();
    for (const auto& r : summary.rows) rows.push_back(summary_row_json(r));
    sum["rows"] = std::move(rows);
    write_text(cfg.output_dir + "/summary.json", sum.dump(2) + "\n");

    {
        File out(cfg.output_dir + "/summary.csv");
        std::fprintf(out.f,
                     "k1_median,mi_mean,mi_std,delay_mean_s,delay_std_s,"
                     "spikes_mean,peaks_mean,releases_mean\n");
        for (const auto& r : summary.rows)
            std::fprintf(out.f, "%s,%s,%s,%s,%s,%s,%s,%s\n",
                         g17(r.k1_median).c_str(), g17(r.mi_mean).c_str(),
                         csv_field(r.mi_std).c_str(),
                         csv_field(r.delay_mean).c_str(),
                         csv_field(r.delay_std).c_str(),
                         g17(r.spikes_mean).c_str(), g17(r.peaks_mean).c_str(),
                         g17(r.releases_mean).c_str());
    }

    const auto n_trials = static_cast<std::size_t>(cfg.trials_per_median);
    for (std::size_t m = 0; m < summary.rows.size(); ++m) {
        std::size_t ok = 0;
        for (std::size_t t = 0; t < n_trials; ++t)
            if (summary.trials[m * n_trials + t].status == "ok") ++ok;
        const auto& r = summary.rows[m];
        json mj;
        mj["k1_median"] = r.k1_median;
        mj["trials"] = ok;
        mj["mi_mean"] = r.mi_mean;
        mj["mi_std"] = r.mi_std ? json(*r.mi_std) : json(nullptr);
        mj["delay_mean"] = r.delay_mean ? json(*r.delay_mean) : json(nullptr);
        mj["delay_std"] = r.delay_std ? json(*r.delay_std) : json(nullptr);
        mj["ap_count_mean"] = r.spikes_mean;
        mj["peak_count_mean"] = r.peaks_mean;
        write_text(cfg.output_dir + "/metrics_" + std::to_string(m) + ".json",
                   mj.dump(2) + "\n");
    }
}

TrialMetrics recompute_metrics_from_dir(const std::string& dir) {
    std::ifstream in(dir + "/manifest.json");
    if (!in)
        throw ConfigError("metrics: cannot open \"" + dir + "/manifest.json\"");
    json man;
    try {
        man = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("metrics: bad manifest: ") + e.what());
    }
    if (man.value("status", "") != std::string("ok"))
        throw ConfigError("metrics: trial did not complete (status \"" +
                          man.value("status", "?") + "\")");
    const auto& cj = man.at("config");
    const double t_end = cj.at("t_end_s").get<double>();
    const double w = cj.at("bin_width_s").get<double>();

    const auto peaks = read_time_column(dir + "/peaks.csv");
    const auto spikes = read_time_column(dir + "/spikes.csv");

    std::vector<double> releases;
    std::size_t n_events = 0;
    {
        std::ifstream rin(dir + "/releases.csv");
        if (!rin) throw SimError("io: cannot read \"" + dir + "/releases.csv\"");
        std::string line;
        std::getline(rin, line);
        while (std::getline(rin, line)) {
            if (line.empty()) continue;
            char* end = nullptr;
            const double t = std::strtod(line.c_str(), &end);
            if (!end || *end != ',')
                throw SimError("io: malformed row in releases.csv");
            const long k = std::strtol(end + 1, &end, 10);
            ++n_events;
            if (k >= 1) releases.push_back(t);
        }
    }

    TrialMetrics m;
    m.n_peaks = peaks.size();
    m.n_spikes = spikes.size();
    m.n_releases = releases.size();
    const auto x = binarize_events(peaks, 0.0, t_end, w);
    const auto y = binarize_events(releases, 0.0, t_end, w);
    m.mi = mutual_information(joint_probabilities(x, y));
    if (t_end > 0.5 * w) {
        const auto xs = binarize_events(peaks, 0.5 * w, t_end, w);
        const auto ys = binarize_events(releases, 0.5 * w, t_end, w);
        m.mi_half_bin_shift = mutual_information(joint_probabilities(xs, ys));
    }
    const DelayStats d = compute_delays(peaks, releases);
    m.delay_mean = d.mean;
    m.delay_std = d.std_dev;
    m.n_delays = d.delays.size();
    return m;
}

}  // namespace vagus
