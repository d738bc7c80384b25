#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vagus/errors.hpp"
#include "vagus/io.hpp"

namespace vagus {

namespace {

using json = nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    if (!obj.is_object())
        throw ConfigError("config: " + where + " must be a JSON object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("config: unknown key \"" + item.key() + "\" in " + where);
    }
}

double get_num(const json& obj, const char* key, double fallback,
               const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw ConfigError("config: " + where + "." + key + " must be a number");
    return v.get<double>();
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback,
                      const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number_unsigned() && !v.is_number_integer())
        throw ConfigError("config: " + where + "." + key + " must be an integer");
    return v.get<std::uint64_t>();
}

void parse_cascade(const json& obj, CascadeParams& p) {
    check_keys(obj,
               {"k1_um_per_s", "k2_per_s", "k3_um_per_s", "k4_um", "k5_um_per_s",
                "k6_um", "k7_per_s", "k8_um_per_s", "k9_um", "k10_per_um_s",
                "k11_um", "k12_per_s", "k13_per_s", "k14_um_per_s", "k15_um",
                "k16_um_per_s", "k17_um"},
               "params.cascade");
    const std::string w = "params.cascade";
    p.k1 = get_num(obj, "k1_um_per_s", p.k1, w);
    p.k2 = get_num(obj, "k2_per_s", p.k2, w);
    p.k3 = get_num(obj, "k3_um_per_s", p.k3, w);
    p.k4 = get_num(obj, "k4_um", p.k4, w);
    p.k5 = get_num(obj, "k5_um_per_s", p.k5, w);
    p.k6 = get_num(obj, "k6_um", p.k6, w);
    p.k7 = get_num(obj, "k7_per_s", p.k7, w);
    p.k8 = get_num(obj, "k8_um_per_s", p.k8, w);
    p.k9 = get_num(obj, "k9_um", p.k9, w);
    p.k10 = get_num(obj, "k10_per_um_s", p.k10, w);
    p.k11 = get_num(obj, "k11_um", p.k11, w);
    p.k12 = get_num(obj, "k12_per_s", p.k12, w);
    p.k13 = get_num(obj, "k13_per_s", p.k13, w);
    p.k14 = get_num(obj, "k14_um_per_s", p.k14, w);
    p.k15 = get_num(obj, "k15_um", p.k15, w);
    p.k16 = get_num(obj, "k16_um_per_s", p.k16, w);
    p.k17 = get_num(obj, "k17_um", p.k17, w);
}

void parse_hh(const json& obj, HHParams& p) {
    check_keys(obj,
               {"c_m_uf_per_cm2", "g_na_ms_per_cm2", "g_k_ms_per_cm2",
                "g_l_ms_per_cm2", "g_cak_ms_per_cm2", "e_na_mv", "e_k_mv",
                "e_l_mv", "e_cak_mv", "i_ext_ua_per_cm2"},
               "params.hh");
    const std::string w = "params.hh";
    p.c_m = get_num(obj, "c_m_uf_per_cm2", p.c_m, w);
    p.g_na = get_num(obj, "g_na_ms_per_cm2", p.g_na, w);
    p.g_k = get_num(obj, "g_k_ms_per_cm2", p.g_k, w);
    p.g_l = get_num(obj, "g_l_ms_per_cm2", p.g_l, w);
    p.g_cak = get_num(obj, "g_cak_ms_per_cm2", p.g_cak, w);
    p.e_na = get_num(obj, "e_na_mv", p.e_na, w);
    p.e_k = get_num(obj, "e_k_mv", p.e_k, w);
    p.e_l = get_num(obj, "e_l_mv", p.e_l, w);
    p.e_cak = get_num(obj, "e_cak_mv", p.e_cak, w);
    p.i_ext = get_num(obj, "i_ext_ua_per_cm2", p.i_ext, w);
}

void parse_synapse(const json& obj, SynapseParams& p) {
    check_keys(obj,
               {"n_vesicles", "nt_per_vesicle_mol", "v_syn_cm3", "p_release",
                "tau_rec_ms", "v_th_mv"},
               "params.synapse");
    const std::string w = "params.synapse";
    p.n_vesicles = static_cast<int>(get_num(obj, "n_vesicles",
                                            static_cast<double>(p.n_vesicles), w));
    p.nt_per_vesicle_mol = get_num(obj, "nt_per_vesicle_mol", p.nt_per_vesicle_mol, w);
    p.v_syn_cm3 = get_num(obj, "v_syn_cm3", p.v_syn_cm3, w);
    p.p_release = get_num(obj, "p_release", p.p_release, w);
    p.tau_rec_ms = get_num(obj, "tau_rec_ms", p.tau_rec_ms, w);
    p.v_th_mv = get_num(obj, "v_th_mv", p.v_th_mv, w);
}

void parse_trial(const json& obj, TrialConfig& tc) {
    check_keys(obj,
               {"t_end_s", "dt_cascade_s", "dt_hh_ms", "bin_width_s",
                "refractory_ms", "seed", "recorder", "params"},
               "trial_template");
    const std::string w = "trial_template";
    tc.t_end_s = get_num(obj, "t_end_s", tc.t_end_s, w);
    tc.dt_cascade_s = get_num(obj, "dt_cascade_s", tc.dt_cascade_s, w);
    tc.dt_hh_ms = get_num(obj, "dt_hh_ms", tc.dt_hh_ms, w);
    tc.bin_width_s = get_num(obj, "bin_width_s", tc.bin_width_s, w);
    tc.refractory_ms = get_num(obj, "refractory_ms", tc.refractory_ms, w);
    tc.seed = get_u64(obj, "seed", tc.seed, w);

    if (obj.contains("recorder")) {
        const auto& r = obj.at("recorder");
        check_keys(r, {"coarse_ms", "fine_ms", "spike_window_ms"}, "recorder");
        tc.recorder.coarse_ms = get_num(r, "coarse_ms", tc.recorder.coarse_ms, "recorder");
        tc.recorder.fine_ms = get_num(r, "fine_ms", tc.recorder.fine_ms, "recorder");
        tc.recorder.spike_window_ms =
            get_num(r, "spike_window_ms", tc.recorder.spike_window_ms, "recorder");
    }
    if (obj.contains("params")) {
        const auto& p = obj.at("params");
        check_keys(p, {"cascade", "hh", "synapse", "peaks", "initial_state"},
                   "params");
        if (p.contains("cascade")) parse_cascade(p.at("cascade"), tc.cascade);
        if (p.contains("hh")) parse_hh(p.at("hh"), tc.hh);
        if (p.contains("synapse")) parse_synapse(p.at("synapse"), tc.synapse);
        if (p.contains("peaks")) {
            const auto& pk = p.at("peaks");
            check_keys(pk, {"min_height_um", "min_separation_s"}, "params.peaks");
            tc.peaks.min_height =
                get_num(pk, "min_height_um", tc.peaks.min_height, "params.peaks");
            tc.peaks.min_separation = get_num(pk, "min_separation_s",
                                              tc.peaks.min_separation, "params.peaks");
        }
        if (p.contains("initial_state")) {
            const auto& is = p.at("initial_state");
            check_keys(is, {"g_alpha_um", "plc_um", "ca_c_um", "ca_er_um"},
                       "params.initial_state");
            tc.initial_state.g_alpha =
                get_num(is, "g_alpha_um", tc.initial_state.g_alpha, "initial_state");
            tc.initial_state.plc =
                get_num(is, "plc_um", tc.initial_state.plc, "initial_state");
            tc.initial_state.ca_c =
                get_num(is, "ca_c_um", tc.initial_state.ca_c, "initial_state");
            tc.initial_state.ca_er =
                get_num(is, "ca_er_um", tc.initial_state.ca_er, "initial_state");
        }
    }
}

json cascade_to_json(const CascadeParams& p) {
    json j;
    j["k1_um_per_s"] = p.k1;
    j["k2_per_s"] = p.k2;
    j["k3_um_per_s"] = p.k3;
    j["k4_um"] = p.k4;
    j["k5_um_per_s"] = p.k5;
    j["k6_um"] = p.k6;
    j["k7_per_s"] = p.k7;
    j["k8_um_per_s"] = p.k8;
    j["k9_um"] = p.k9;
    j["k10_per_um_s"] = p.k10;
    j["k11_um"] = p.k11;
    j["k12_per_s"] = p.k12;
    j["k13_per_s"] = p.k13;
    j["k14_um_per_s"] = p.k14;
    j["k15_um"] = p.k15;
    j["k16_um_per_s"] = p.k16;
    j["k17_um"] = p.k17;
    return j;
}

json hh_to_json(const HHParams& p) {
    json j;
    j["c_m_uf_per_cm2"] = p.c_m;
    j["g_na_ms_per_cm2"] = p.g_na;
    j["g_k_ms_per_cm2"] = p.g_k;
    j["g_l_ms_per_cm2"] = p.g_l;
    j["g_cak_ms_per_cm2"] = p.g_cak;
    j["e_na_mv"] = p.e_na;
    j["e_k_mv"] = p.e_k;
    j["e_l_mv"] = p.e_l;
    j["e_cak_mv"] = p.e_cak;
    j["i_ext_ua_per_cm2"] = p.i_ext;
    return j;
}

json synapse_to_json(const SynapseParams& p) {
    json j;
    j["n_vesicles"] = p.n_vesicles;
    j["nt_per_vesicle_mol"] = p.nt_per_vesicle_mol;
    j["v_syn_cm3"] = p.v_syn_cm3;
    j["p_release"] = p.p_release;
    j["tau_rec_ms"] = p.tau_rec_ms;
    j["v_th_mv"] = p.v_th_mv;
    return j;
}

json trial_to_json(const TrialConfig& tc) {
    json j;
    j["t_end_s"] = tc.t_end_s;
    j["dt_cascade_s"] = tc.dt_cascade_s;
    j["dt_hh_ms"] = tc.dt_hh_ms;
    j["bin_width_s"] = tc.bin_width_s;
    j["refractory_ms"] = tc.refractory_ms;
    j["seed"] = tc.seed;
    j["recorder"] = {{"coarse_ms", tc.recorder.coarse_ms},
                     {"fine_ms", tc.recorder.fine_ms},
                     {"spike_window_ms", tc.recorder.spike_window_ms}};
    json params;
    params["cascade"] = cascade_to_json(tc.cascade);
    params["hh"] = hh_to_json(tc.hh);
    params["synapse"] = synapse_to_json(tc.synapse);
    params["peaks"] = {{"min_height_um", tc.peaks.min_height},
                       {"min_separation_s", tc.peaks.min_separation}};
    params["initial_state"] = {{"g_alpha_um", tc.initial_state.g_alpha},
                               {"plc_um", tc.initial_state.plc},
                               {"ca_c_um", tc.initial_state.ca_c},
                               {"ca_er_um", tc.initial_state.ca_er}};
    j["params"] = std::move(params);
    return j;
}

json sweep_to_json(const SweepConfig& cfg) {
    json j;
    j["k1_medians"] = cfg.k1_medians;
    if (cfg.mean_to_std_ratio)
        j["mean_to_std_ratio"] = *cfg.mean_to_std_ratio;
    else
        j["mean_to_std_ratio"] = nullptr;
    j["trials_per_median"] = cfg.trials_per_median;
    j["master_seed"] = cfg.master_seed;
    j["output_dir"] = cfg.output_dir;
    j["store_traces"] =
        cfg.store_traces == TraceStorage::traces ? "traces" : "events_only";
    j["failure_threshold"] = cfg.failure_threshold;
    j["trial_template"] = trial_to_json(cfg.trial_template);
    json ov = json::array();
    for (const auto& o : cfg.override_trials)
        ov.push_back({{"median_index", o.median_index},
                      {"trial_index", o.trial_index},
                      {"k1", o.k1}});
    j["override_trials"] = std::move(ov);
    return j;
}

}  // namespace

SweepConfig parse_sweep_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: JSON parse failed: ") + e.what());
    }
    check_keys(doc,
               {"k1_medians", "mean_to_std_ratio", "trials_per_median",
                "master_seed", "output_dir", "store_traces", "trial_template",
                "override_trials", "failure_threshold"},
               "top level");

    SweepConfig cfg;
    if (doc.contains("k1_medians")) {
        const auto& arr = doc.at("k1_medians");
        if (!arr.is_array() || arr.empty())
            throw ConfigError("config: k1_medians must be a non-empty array");
        cfg.k1_medians.clear();
        for (const auto& v : arr) {
            if (!v.is_number())
                throw ConfigError("config: k1_medians entries must be numbers");
            cfg.k1_medians.push_back(v.get<double>());
        }
    }
    if (doc.contains("mean_to_std_ratio")) {
        const auto& v = doc.at("mean_to_std_ratio");
        if (v.is_null())
            cfg.mean_to_std_ratio.reset();
        else if (v.is_number())
            cfg.mean_to_std_ratio = v.get<double>();
        else
            throw ConfigError("config: mean_to_std_ratio must be a number or null");
    }
    cfg.trials_per_median = static_cast<int>(get_u64(
        doc, "trials_per_median", static_cast<std::uint64_t>(cfg.trials_per_median),
        "top level"));
    cfg.master_seed = get_u64(doc, "master_seed", cfg.master_seed, "top level");
    if (doc.contains("output_dir")) {
        if (!doc.at("output_dir").is_string())
            throw ConfigError("config: output_dir must be a string");
        cfg.output_dir = doc.at("output_dir").get<std::string>();
    }
    if (doc.contains("store_traces")) {
        const auto s = doc.at("store_traces").get<std::string>();
        if (s == "traces")
            cfg.store_traces = TraceStorage::traces;
        else if (s == "events_only")
            cfg.store_traces = TraceStorage::events_only;
        else
            throw ConfigError("config: store_traces must be \"traces\" or \"events_only\"");
    }
    cfg.failure_threshold =
        get_num(doc, "failure_threshold", cfg.failure_threshold, "top level");
    if (doc.contains("trial_template"))
        parse_trial(doc.at("trial_template"), cfg.trial_template);
    if (doc.contains("override_trials")) {
        const auto& arr = doc.at("override_trials");
        if (!arr.is_array())
            throw ConfigError("config: override_trials must be an array");
        for (const auto& o : arr) {
            check_keys(o, {"median_index", "trial_index", "k1"}, "override_trials[]");
            TrialOverride ov;
            ov.median_index = static_cast<std::size_t>(
                get_u64(o, "median_index", 0, "override_trials[]"));
            ov.trial_index = static_cast<std::size_t>(
                get_u64(o, "trial_index", 0, "override_trials[]"));
            ov.k1 = get_num(o, "k1", 0.0, "override_trials[]");
            cfg.override_trials.push_back(ov);
        }
    }
    cfg.validate();
    return cfg;
}

SweepConfig load_sweep_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open \"" + path + "\"");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sweep_config(ss.str());
}

std::string sweep_config_to_json(const SweepConfig& cfg) {
    return sweep_to_json(cfg).dump(2);
}

std::string trial_config_to_json(const TrialConfig& cfg) {
    return trial_to_json(cfg).dump(2);
}

namespace detail {

// Shared with csvio.cpp; not part of the public surface.
nlohmann::ordered_json sweep_config_json(const SweepConfig& cfg) {
    return sweep_to_json(cfg);
}
nlohmann::ordered_json trial_config_json(const TrialConfig& cfg) {
    return trial_to_json(cfg);
}

}  // namespace detail

}  // namespace vagus
