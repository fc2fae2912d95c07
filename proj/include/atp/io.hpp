#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "atp/analysis.hpp"
#include "atp/error.hpp"
#include "atp/session.hpp"

namespace atp {

// ---------------------------------------------------------------------------
// Canonical value rendering
//
// All decimals in CSV files are rendered with six fractional digits; that
// rendering is the canonical precision of the interchange format, so
// write -> read -> write round-trips byte-identically.
// ---------------------------------------------------------------------------

inline std::string format_fixed6(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

inline std::string range_name(RangeClass r) {
    return r == RangeClass::Small ? "small" : "large";
}

inline std::string kind_name(TrialKind k) {
    switch (k) {
        case TrialKind::Training: return "training";
        case TrialKind::Catch: return "catch";
        case TrialKind::StaircaseForward: return "staircase_forward";
        case TrialKind::StaircaseBackward: return "staircase_backward";
    }
    return "?";
}

inline std::string staircase_name(std::optional<StaircaseId> id) {
    if (!id) return "";
    return *id == StaircaseId::Upper ? "upper" : "lower";
}

inline std::string direction_name(std::optional<AdjustmentDirection> d) {
    if (!d) return "";
    return *d == AdjustmentDirection::Forward ? "forward" : "backward";
}

// ---------------------------------------------------------------------------
// Trial log CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kTrialLogHeader =
    "participant_id,block_index,block_range,trial_index,kind,staircase_id,direction,"
    "zone_index,origin_x,origin_y,selected_x,selected_y,adjusted_x,adjusted_y,"
    "commanded_magnitude,effective_magnitude,response_detected,reversal_logged";

inline void write_trial_log(std::ostream& out, const std::vector<TrialRecord>& trials) {
    out << kTrialLogHeader << '\n';
    for (const auto& t : trials) {
        out << t.participant_id << ',' << t.block_index << ',' << range_name(t.block_range) << ','
            << t.trial_index << ',' << kind_name(t.kind) << ',' << staircase_name(t.staircase_id)
            << ',' << direction_name(trial_direction(t.kind)) << ',' << t.zone_index << ','
            << format_fixed6(t.origin.x) << ',' << format_fixed6(t.origin.y) << ','
            << format_fixed6(t.selected.x) << ',' << format_fixed6(t.selected.y) << ','
            << format_fixed6(t.adjusted.x) << ',' << format_fixed6(t.adjusted.y) << ','
            << format_fixed6(t.commanded_magnitude) << ',' << format_fixed6(t.effective_magnitude)
            << ',' << (t.response_detected ? 1 : 0) << ',' << (t.reversal_logged ? 1 : 0) << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("trailing characters in number '" + s + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + s + "'", line);
    }
}

inline int parse_int(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        const int v = std::stoi(s, &pos);
        if (pos != s.size()) throw ParseError("trailing characters in integer '" + s + "'", line);
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'", line);
    }
}

inline bool parse_bool01(const std::string& s, int line) {
    if (s == "0") return false;
    if (s == "1") return true;
    throw ParseError("expected 0 or 1, got '" + s + "'", line);
}

}  // namespace detail

inline std::vector<TrialRecord> read_trial_log(std::istream& in) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty trial log", 1);
    ++line_no;
    if (line != kTrialLogHeader) throw ParseError("unexpected trial log header", 1);

    std::vector<TrialRecord> trials;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 18)
            throw ParseError("expected 18 fields, got " + std::to_string(f.size()), line_no);
        TrialRecord t;
        t.participant_id = detail::parse_int(f[0], line_no);
        t.block_index = detail::parse_int(f[1], line_no);
        if (f[2] == "small") t.block_range = RangeClass::Small;
        else if (f[2] == "large") t.block_range = RangeClass::Large;
        else throw ParseError("unknown block_range '" + f[2] + "'", line_no);
        t.trial_index = detail::parse_int(f[3], line_no);
        if (f[4] == "training") t.kind = TrialKind::Training;
        else if (f[4] == "catch") t.kind = TrialKind::Catch;
        else if (f[4] == "staircase_forward") t.kind = TrialKind::StaircaseForward;
        else if (f[4] == "staircase_backward") t.kind = TrialKind::StaircaseBackward;
        else throw ParseError("unknown trial kind '" + f[4] + "'", line_no);
        if (f[5] == "upper") t.staircase_id = StaircaseId::Upper;
        else if (f[5] == "lower") t.staircase_id = StaircaseId::Lower;
        else if (!f[5].empty()) throw ParseError("unknown staircase_id '" + f[5] + "'", line_no);
        // f[6] (direction) is derived from the kind; validated for consistency.
        if (f[6] != direction_name(trial_direction(t.kind)))
            throw ParseError("direction does not match trial kind", line_no);
        t.zone_index = detail::parse_int(f[7], line_no);
        if (t.zone_index < 0 || t.zone_index > 3) throw ParseError("zone_index out of range", line_no);
        t.origin = {detail::parse_double(f[8], line_no), detail::parse_double(f[9], line_no)};
        t.selected = {detail::parse_double(f[10], line_no), detail::parse_double(f[11], line_no)};
        t.adjusted = {detail::parse_double(f[12], line_no), detail::parse_double(f[13], line_no)};
        t.commanded_magnitude = detail::parse_double(f[14], line_no);
        t.effective_magnitude = detail::parse_double(f[15], line_no);
        t.response_detected = detail::parse_bool01(f[16], line_no);
        t.reversal_logged = detail::parse_bool01(f[17], line_no);
        trials.push_back(t);
    }
    return trials;
}

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kDatasetHeader =
    "participant_id,included,threshold_forward_small,threshold_forward_large,"
    "threshold_backward_small,threshold_backward_large,sot_error,sbsod,vr_experience";

inline void write_dataset(std::ostream& out, const ExperimentDataset& dataset) {
    out << kDatasetHeader << '\n';
    for (const auto& r : dataset.rows) {
        out << r.participant_id << ',' << (r.included ? 1 : 0);
        for (int c = 0; c < kConditionCount; ++c) out << ',' << format_fixed6(r.threshold[c]);
        out << ',' << format_fixed6(r.sot_error) << ',' << format_fixed6(r.sbsod) << ','
            << r.vr_experience << '\n';
    }
}

inline ExperimentDataset read_dataset(std::istream& in) {
    std::string line;
    int line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty dataset", 1);
    ++line_no;
    if (line != kDatasetHeader) throw ParseError("unexpected dataset header", 1);

    ExperimentDataset dataset;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != 9)
            throw ParseError("expected 9 fields, got " + std::to_string(f.size()), line_no);
        ParticipantRow r;
        r.participant_id = detail::parse_int(f[0], line_no);
        r.included = detail::parse_bool01(f[1], line_no);
        for (int c = 0; c < kConditionCount; ++c)
            r.threshold[c] = detail::parse_double(f[2 + c], line_no);
        r.sot_error = detail::parse_double(f[6], line_no);
        r.sbsod = detail::parse_double(f[7], line_no);
        r.vr_experience = detail::parse_int(f[8], line_no);
        dataset.rows.push_back(r);
    }
    return dataset;
}

// ---------------------------------------------------------------------------
// Run configuration (single JSON document)
// ---------------------------------------------------------------------------

struct RunConfig {
    std::uint64_t seed = 0;
    int n_participants = 31;
    std::string output_dir;
    StaircaseConfig staircase;
    BlockConfig block_small = BlockConfig::for_range(TeleportRange::small());
    BlockConfig block_large = BlockConfig::for_range(TeleportRange::large());
    PopulationConfig population;
};

namespace detail {

using json = nlohmann::json;

inline void expect_object(const json& j, const std::string& scope) {
    if (!j.is_object()) throw ValidationError("config: field '" + scope + "' must be an object");
}

inline void check_keys(const json& obj, const std::string& scope,
                       std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) known = true;
        if (!known)
            throw ValidationError("config: unknown field '" +
                                  (scope.empty() ? it.key() : scope + "." + it.key()) + "'");
    }
}

inline double get_number(const json& obj, const std::string& scope, const char* key, double def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_number())
        throw ValidationError("config: field '" + scope + "." + key + "' must be a number");
    return obj[key].get<double>();
}

inline int get_integer(const json& obj, const std::string& scope, const char* key, int def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_number_integer())
        throw ValidationError("config: field '" + scope + "." + key + "' must be an integer");
    return obj[key].get<int>();
}

inline bool get_boolean(const json& obj, const std::string& scope, const char* key, bool def) {
    if (!obj.contains(key)) return def;
    if (!obj[key].is_boolean())
        throw ValidationError("config: field '" + scope + "." + key + "' must be a boolean");
    return obj[key].get<bool>();
}

inline StaircaseConfig parse_staircase(const json& j) {
    expect_object(j, "staircase");
    check_keys(j, "staircase",
               {"start_upper", "start_lower", "base_step", "reversals_to_converge",
                "reversals_to_average", "quick_start", "stimulus_floor", "pooled_averaging"});
    StaircaseConfig s;
    s.start_upper = get_number(j, "staircase", "start_upper", s.start_upper);
    s.start_lower = get_number(j, "staircase", "start_lower", s.start_lower);
    s.base_step = get_number(j, "staircase", "base_step", s.base_step);
    s.reversals_to_converge =
        get_integer(j, "staircase", "reversals_to_converge", s.reversals_to_converge);
    s.reversals_to_average =
        get_integer(j, "staircase", "reversals_to_average", s.reversals_to_average);
    s.quick_start = get_boolean(j, "staircase", "quick_start", s.quick_start);
    s.stimulus_floor = get_number(j, "staircase", "stimulus_floor", s.stimulus_floor);
    s.averaging = get_boolean(j, "staircase", "pooled_averaging", false)
                      ? ThresholdAveraging::PooledPair
                      : ThresholdAveraging::PerStaircase;
    return s;
}

inline BlockConfig parse_block(const json& j, const std::string& scope, TeleportRange range,
                               const StaircaseConfig& staircase) {
    expect_object(j, scope);
    check_keys(j, scope,
               {"training_trials", "catch_trials", "catch_pass_fraction", "max_trials",
                "zone_radius", "max_adjustment"});
    range.zone_radius = get_number(j, scope, "zone_radius", range.zone_radius);
    range.max_adjustment = get_number(j, scope, "max_adjustment", range.max_adjustment);
    BlockConfig b = BlockConfig::for_range(range, staircase);
    b.training_trials = get_integer(j, scope, "training_trials", b.training_trials);
    b.catch_trials = get_integer(j, scope, "catch_trials", b.catch_trials);
    b.catch_pass_fraction = get_number(j, scope, "catch_pass_fraction", b.catch_pass_fraction);
    b.max_trials = get_integer(j, scope, "max_trials", b.max_trials);
    return b;
}

inline PopulationConfig parse_population(const json& j) {
    expect_object(j, "population");
    check_keys(j, "population",
               {"pse_mean_forward_small", "pse_mean_forward_large", "pse_mean_backward_small",
                "pse_mean_backward_large", "pse_sd", "pse_shared_sd", "slope_sigma",
                "false_alarm_gamma", "lapse_lambda", "sot_mean", "sot_sd", "sbsod_mean",
                "sbsod_sd", "vr_mean", "vr_sd", "sot_backward_large_r", "vr_backward_small_r"});
    PopulationConfig p;
    const std::string scope = "population";
    p.pse_mean[static_cast<int>(Condition::ForwardSmall)] =
        get_number(j, scope, "pse_mean_forward_small", p.pse_mean[0]);
    p.pse_mean[static_cast<int>(Condition::ForwardLarge)] =
        get_number(j, scope, "pse_mean_forward_large", p.pse_mean[1]);
    p.pse_mean[static_cast<int>(Condition::BackwardSmall)] =
        get_number(j, scope, "pse_mean_backward_small", p.pse_mean[2]);
    p.pse_mean[static_cast<int>(Condition::BackwardLarge)] =
        get_number(j, scope, "pse_mean_backward_large", p.pse_mean[3]);
    p.pse_sd = get_number(j, scope, "pse_sd", p.pse_sd);
    p.pse_shared_sd = get_number(j, scope, "pse_shared_sd", p.pse_shared_sd);
    p.slope_sigma = get_number(j, scope, "slope_sigma", p.slope_sigma);
    p.false_alarm_gamma = get_number(j, scope, "false_alarm_gamma", p.false_alarm_gamma);
    p.lapse_lambda = get_number(j, scope, "lapse_lambda", p.lapse_lambda);
    p.sot_mean = get_number(j, scope, "sot_mean", p.sot_mean);
    p.sot_sd = get_number(j, scope, "sot_sd", p.sot_sd);
    p.sbsod_mean = get_number(j, scope, "sbsod_mean", p.sbsod_mean);
    p.sbsod_sd = get_number(j, scope, "sbsod_sd", p.sbsod_sd);
    p.vr_mean = get_number(j, scope, "vr_mean", p.vr_mean);
    p.vr_sd = get_number(j, scope, "vr_sd", p.vr_sd);
    p.sot_backward_large_r = get_number(j, scope, "sot_backward_large_r", p.sot_backward_large_r);
    p.vr_backward_small_r = get_number(j, scope, "vr_backward_small_r", p.vr_backward_small_r);
    return p;
}

}  // namespace detail

inline RunConfig parse_run_config(const nlohmann::json& j) {
    detail::expect_object(j, "<root>");
    detail::check_keys(j, "",
                       {"seed", "n_participants", "output_dir", "staircase", "blocks",
                        "population"});
    RunConfig cfg;
    if (!j.contains("seed"))
        throw ValidationError("config: missing required field 'seed'");
    if (!j["seed"].is_number_integer() ||
        (!j["seed"].is_number_unsigned() && j["seed"].get<long long>() < 0))
        throw ValidationError("config: field 'seed' must be a non-negative integer");
    cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.n_participants = detail::get_integer(j, "", "n_participants", cfg.n_participants);
    if (cfg.n_participants < 1)
        throw ValidationError("config: field 'n_participants' must be >= 1");
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string())
            throw ValidationError("config: field 'output_dir' must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("staircase")) cfg.staircase = detail::parse_staircase(j["staircase"]);

    nlohmann::json small_block = nlohmann::json::object();
    nlohmann::json large_block = nlohmann::json::object();
    if (j.contains("blocks")) {
        detail::expect_object(j["blocks"], "blocks");
        detail::check_keys(j["blocks"], "blocks", {"small", "large"});
        if (j["blocks"].contains("small")) small_block = j["blocks"]["small"];
        if (j["blocks"].contains("large")) large_block = j["blocks"]["large"];
    }
    cfg.block_small =
        detail::parse_block(small_block, "blocks.small", TeleportRange::small(), cfg.staircase);
    cfg.block_large =
        detail::parse_block(large_block, "blocks.large", TeleportRange::large(), cfg.staircase);
    if (j.contains("population")) cfg.population = detail::parse_population(j["population"]);

    // Surface invalid values now, with config-field wording.
    try {
        cfg.block_small.validate();
        cfg.block_large.validate();
        Population probe(cfg.population);
    } catch (const ConfigError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    return cfg;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config: invalid JSON in '" + path + "': " + e.what());
    }
    return parse_run_config(j);
}

// ---------------------------------------------------------------------------
// Simulation driver
// ---------------------------------------------------------------------------

struct SimulationOutputs {
    ExperimentResult experiment;
    bool report_valid = false;
    AnalysisReport report;
    nlohmann::ordered_json summary;
};

namespace detail {

inline nlohmann::ordered_json effect_json(const EffectResult& e) {
    nlohmann::ordered_json j;
    j["F"] = e.F;
    j["df"] = {e.df1, e.df2};
    j["p"] = e.p;
    j["partial_eta_sq"] = e.partial_eta_sq;
    j["degenerate"] = e.degenerate;
    return j;
}

}  // namespace detail

/// JSON view of an analysis report (used by the summary file and `analyze --json`).
inline nlohmann::ordered_json report_json(const AnalysisReport& report) {
    nlohmann::ordered_json j;
    j["n_total"] = report.n_total;
    j["n_included"] = report.n_included;
    nlohmann::ordered_json conditions;
    for (int c = 0; c < kConditionCount; ++c) {
        const Descriptives& d = report.condition_stats[c];
        nlohmann::ordered_json cj;
        cj["mean"] = d.mean;
        cj["sd"] = d.sd;
        cj["q1"] = d.q1;
        cj["median"] = d.median;
        cj["q3"] = d.q3;
        cj["n_outliers"] = d.outlier_rows.size();
        conditions[condition_name(static_cast<Condition>(c))] = cj;
    }
    j["conditions"] = conditions;
    if (report.anova_valid) {
        nlohmann::ordered_json anova;
        anova["direction"] = detail::effect_json(report.art.direction);
        anova["size"] = detail::effect_json(report.art.size);
        anova["interaction"] = detail::effect_json(report.art.interaction);
        j["anova_art"] = anova;
    }
    if (report.correlations.sufficient_n) {
        nlohmann::ordered_json corr;
        for (int t = 0; t < 3; ++t) {
            nlohmann::ordered_json row;
            for (int c = 0; c < kConditionCount; ++c) {
                const CorrelationCell& cell = report.correlations.cells[t][c];
                nlohmann::ordered_json cj;
                cj["r"] = cell.r;
                cj["p"] = cell.p;
                cj["p_adjusted"] = cell.p_adjusted;
                cj["starred"] = cell.starred;
                row[condition_name(static_cast<Condition>(c))] = cj;
            }
            corr[kTraitNames[t]] = row;
        }
        j["correlations"] = corr;
    }
    return j;
}

inline nlohmann::ordered_json build_summary(const RunConfig& cfg, const ExperimentResult& result,
                                            const AnalysisReport* report) {
    nlohmann::ordered_json j;
    j["seed"] = cfg.seed;
    j["n_participants"] = cfg.n_participants;
    j["n_included"] = result.dataset.included_count();
    nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
    for (const auto& r : result.dataset.rows)
        if (!r.included) excluded.push_back(r.participant_id);
    j["excluded_participants"] = excluded;
    j["n_trials"] = result.trials.size();
    if (report != nullptr) {
        const nlohmann::ordered_json rj = report_json(*report);
        for (auto it = rj.begin(); it != rj.end(); ++it)
            if (it.key() != "n_total" && it.key() != "n_included") j[it.key()] = it.value();
    }
    return j;
}

inline SimulationOutputs run_simulation(const RunConfig& cfg) {
    const Population population(cfg.population);
    ExperimentConfig ecfg{cfg.block_small, cfg.block_large};
    SimulationOutputs out;
    out.experiment = run_experiment(cfg.n_participants, population, cfg.seed, ecfg);
    if (out.experiment.dataset.included_count() >= 1) {
        out.report = analyze_dataset(out.experiment.dataset);
        out.report_valid = true;
    }
    out.summary = build_summary(cfg, out.experiment, out.report_valid ? &out.report : nullptr);
    return out;
}

inline void write_outputs(const SimulationOutputs& out, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "trials.csv", std::ios::binary);
        if (!f) throw ValidationError("cannot write " + (dir / "trials.csv").string());
        write_trial_log(f, out.experiment.trials);
    }
    {
        std::ofstream f(dir / "dataset.csv", std::ios::binary);
        if (!f) throw ValidationError("cannot write " + (dir / "dataset.csv").string());
        write_dataset(f, out.experiment.dataset);
    }
    {
        std::ofstream f(dir / "summary.json", std::ios::binary);
        if (!f) throw ValidationError("cannot write " + (dir / "summary.json").string());
        f << out.summary.dump(2) << '\n';
    }
}

// ---------------------------------------------------------------------------
// Staircase trace reconstruction from a trial log
// ---------------------------------------------------------------------------

struct StaircaseTrace {
    std::vector<std::pair<int, double>> points;  // (1-based trial ordinal, stimulus)
    bool estimate_valid = false;
    double estimate = 0.0;
    std::array<double, 2> per_staircase_means{};
};

/// Rebuilds the stimulus series of one inner staircase and, when the pair has
/// enough logged reversals, its pair-level threshold estimate.
inline StaircaseTrace trace_staircase(const std::vector<TrialRecord>& log, int participant,
                                      int block, AdjustmentDirection dir, StaircaseId id,
                                      int reversals_to_average = 3) {
    const TrialKind want_kind = dir == AdjustmentDirection::Forward
                                    ? TrialKind::StaircaseForward
                                    : TrialKind::StaircaseBackward;
    bool participant_seen = false, block_seen = false;
    std::array<std::vector<double>, 2> reversal_values;  // upper, lower
    StaircaseTrace trace;
    for (const auto& t : log) {
        if (t.participant_id != participant) continue;
        participant_seen = true;
        if (t.block_index != block) continue;
        block_seen = true;
        if (t.kind != want_kind || !t.staircase_id) continue;
        if (t.reversal_logged)
            reversal_values[*t.staircase_id == StaircaseId::Upper ? 0 : 1].push_back(
                t.commanded_magnitude);
        if (*t.staircase_id == id)
            trace.points.emplace_back(static_cast<int>(trace.points.size()) + 1,
                                      t.commanded_magnitude);
    }
    if (!participant_seen)
        throw ValidationError("trace: unknown participant " + std::to_string(participant));
    if (!block_seen) throw ValidationError("trace: unknown block " + std::to_string(block));
    if (trace.points.empty()) throw ValidationError("trace: no trials for that staircase");

    if (static_cast<int>(reversal_values[0].size()) >= reversals_to_average &&
        static_cast<int>(reversal_values[1].size()) >= reversals_to_average) {
        double total = 0.0;
        for (int s = 0; s < 2; ++s) {
            double sum = 0.0;
            const auto& vals = reversal_values[s];
            for (int i = static_cast<int>(vals.size()) - reversals_to_average;
                 i < static_cast<int>(vals.size()); ++i)
                sum += vals[i];
            trace.per_staircase_means[s] = sum / reversals_to_average;
            total += sum;
        }
        trace.estimate = total / (2.0 * reversals_to_average);
        trace.estimate_valid = true;
    }
    return trace;
}

// ---------------------------------------------------------------------------
// Human-readable analysis report
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_p(double p) {
    if (p < 0.001) return "<0.001";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", p);
    return buf;
}

inline std::string effect_line(const char* name, const EffectResult& e) {
    char buf[160];
    if (e.degenerate) {
        std::snprintf(buf, sizeof(buf), "  %-12s degenerate (zero error variance)", name);
        return buf;
    }
    std::snprintf(buf, sizeof(buf), "  %-12s F(%.0f,%.0f)=%.2f, p=%s, partial eta^2=%.2f", name,
                  e.df1, e.df2, e.F, format_p(e.p).c_str(), e.partial_eta_sq);
    return buf;
}

}  // namespace detail

inline std::string render_report(const AnalysisReport& report) {
    std::ostringstream out;
    out << "Participants: " << report.n_included << " included of " << report.n_total << " ("
        << (report.n_total - report.n_included) << " excluded)\n\n";

    out << "Condition thresholds (meters, included participants):\n";
    char buf[200];
    std::snprintf(buf, sizeof(buf), "  %-16s %8s %8s %8s %8s %8s %9s\n", "condition", "mean",
                  "sd", "q1", "median", "q3", "outliers");
    out << buf;
    for (int c = 0; c < kConditionCount; ++c) {
        const Descriptives& d = report.condition_stats[c];
        std::snprintf(buf, sizeof(buf), "  %-16s %8.3f %8.3f %8.3f %8.3f %8.3f %9zu\n",
                      condition_name(static_cast<Condition>(c)).c_str(), d.mean, d.sd, d.q1,
                      d.median, d.q3, d.outlier_rows.size());
        out << buf;
    }

    out << "\nRepeated-measures ANOVA on aligned ranks (direction x size):\n";
    if (!report.anova_valid) {
        out << "  not computed: need at least 2 included participants\n";
    } else {
        out << detail::effect_line("direction:", report.art.direction) << '\n';
        out << detail::effect_line("size:", report.art.size) << '\n';
        out << detail::effect_line("interaction:", report.art.interaction) << '\n';
    }

    out << "\nTrait correlations (Pearson r, * = BH-FDR adjusted p < 0.05):\n";
    if (!report.correlations.sufficient_n) {
        out << "  not computed: need at least 3 included participants\n";
        return out.str();
    }
    std::snprintf(buf, sizeof(buf), "  %-14s", "");
    out << buf;
    for (int c = 0; c < kConditionCount; ++c) {
        std::snprintf(buf, sizeof(buf), " %15s", condition_name(static_cast<Condition>(c)).c_str());
        out << buf;
    }
    out << '\n';
    for (int t = 0; t < 3; ++t) {
        std::snprintf(buf, sizeof(buf), "  %-14s", kTraitNames[t]);
        out << buf;
        for (int c = 0; c < kConditionCount; ++c) {
            const CorrelationCell& cell = report.correlations.cells[t][c];
            if (!cell.defined) {
                std::snprintf(buf, sizeof(buf), " %15s", "n/a");
            } else {
                char val[32];
                std::snprintf(val, sizeof(val), "%.2f%s", cell.r, cell.starred ? "*" : "");
                std::snprintf(buf, sizeof(buf), " %15s", val);
            }
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace atp
