// Command-line front end: run simulated experiments, analyze datasets,
// trace staircases from trial logs, and apply the proxemic teleport
// correction.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "atp/analysis.hpp"
#include "atp/geometry.hpp"
#include "atp/io.hpp"

namespace {

atp::Position2 parse_point(const std::string& text, const std::string& flag) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw atp::ValidationError(flag + ": expected 'x,y', got '" + text + "'");
    try {
        std::size_t px = 0, py = 0;
        const std::string xs = text.substr(0, comma), ys = text.substr(comma + 1);
        const double x = std::stod(xs, &px);
        const double y = std::stod(ys, &py);
        if (px != xs.size() || py != ys.size()) throw std::invalid_argument("trailing characters");
        return {x, y};
    } catch (const std::exception&) {
        throw atp::ValidationError(flag + ": expected 'x,y', got '" + text + "'");
    }
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    atp::RunConfig cfg = atp::load_run_config(config_path);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (cfg.output_dir.empty())
        throw atp::ValidationError("config: missing field 'output_dir' (or pass --out)");

    const atp::SimulationOutputs outputs = atp::run_simulation(cfg);
    atp::write_outputs(outputs, cfg.output_dir);
    std::cout << "participants: " << cfg.n_participants
              << "  included: " << outputs.experiment.dataset.included_count()
              << "  trials: " << outputs.experiment.trials.size() << '\n';
    std::cout << "wrote " << cfg.output_dir << "/trials.csv, dataset.csv, summary.json\n";
    return 0;
}

int cmd_analyze(const std::string& dataset_path, const std::string& json_path) {
    std::ifstream in(dataset_path);
    if (!in) throw atp::ValidationError("cannot open dataset '" + dataset_path + "'");
    const atp::ExperimentDataset dataset = atp::read_dataset(in);
    const atp::AnalysisReport report = atp::analyze_dataset(dataset);
    std::cout << atp::render_report(report);
    if (!json_path.empty()) {
        std::ofstream jout(json_path, std::ios::binary);
        if (!jout) throw atp::ValidationError("cannot write '" + json_path + "'");
        jout << atp::report_json(report).dump(2) << '\n';
    }
    return 0;
}

int cmd_trace(const std::string& log_path, int participant, int block,
              const std::string& staircase_arg, int reversals_to_average) {
    const auto colon = staircase_arg.find(':');
    if (colon == std::string::npos)
        throw atp::ValidationError("--staircase: expected <fwd|back>:<upper|lower>");
    const std::string dir_s = staircase_arg.substr(0, colon);
    const std::string id_s = staircase_arg.substr(colon + 1);
    atp::AdjustmentDirection dir;
    if (dir_s == "fwd") dir = atp::AdjustmentDirection::Forward;
    else if (dir_s == "back") dir = atp::AdjustmentDirection::Backward;
    else throw atp::ValidationError("--staircase: direction must be 'fwd' or 'back'");
    atp::StaircaseId id;
    if (id_s == "upper") id = atp::StaircaseId::Upper;
    else if (id_s == "lower") id = atp::StaircaseId::Lower;
    else throw atp::ValidationError("--staircase: staircase must be 'upper' or 'lower'");

    std::ifstream in(log_path);
    if (!in) throw atp::ValidationError("cannot open log '" + log_path + "'");
    const auto log = atp::read_trial_log(in);
    const atp::StaircaseTrace trace =
        atp::trace_staircase(log, participant, block, dir, id, reversals_to_average);

    std::cout << "trial,stimulus\n";
    for (const auto& [index, stimulus] : trace.points)
        std::cout << index << ',' << atp::format_fixed6(stimulus) << '\n';
    if (trace.estimate_valid) {
        std::cout << "# threshold " << atp::format_fixed6(trace.estimate) << " (upper_mean "
                  << atp::format_fixed6(trace.per_staircase_means[0]) << ", lower_mean "
                  << atp::format_fixed6(trace.per_staircase_means[1]) << ")\n";
    } else {
        std::cout << "# threshold unavailable (staircase pair not converged)\n";
    }
    return 0;
}

int cmd_correct(const std::string& origin_s, const std::string& selected_s,
                const std::string& partner_s, const std::string& zone_s, double threshold_override,
                double threshold_small, double threshold_large, double range_cutoff) {
    const atp::Position2 origin = parse_point(origin_s, "--origin");
    const atp::Position2 selected = parse_point(selected_s, "--selected");
    const atp::Position2 partner = parse_point(partner_s, "--partner");

    atp::ProxemicZone zone;
    if (zone_s == "intimate") zone = atp::ProxemicZone::Intimate;
    else if (zone_s == "personal") zone = atp::ProxemicZone::Personal;
    else if (zone_s == "social") zone = atp::ProxemicZone::Social;
    else throw atp::ValidationError("--zone must be one of intimate, personal, social");

    double threshold = atp::distance(origin, selected) <= range_cutoff ? threshold_small
                                                                       : threshold_large;
    if (threshold_override >= 0.0) threshold = threshold_override;

    const atp::ProxemicCorrection result =
        atp::proxemic_correction(origin, selected, partner, threshold, zone);
    std::cout << "adjusted " << atp::format_fixed6(result.destination.x) << ','
              << atp::format_fixed6(result.destination.y) << '\n';
    std::cout << "magnitude " << atp::format_fixed6(result.magnitude) << '\n';
    std::cout << "threshold " << atp::format_fixed6(threshold) << '\n';
    std::cout << "attained " << (result.attained ? 1 : 0) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adjusted-teleportation threshold simulation and analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* simulate = app.add_subcommand("simulate", "Run a simulated experiment from a config");
    simulate->add_option("--config", config_path, "Run configuration (JSON)")->required();
    simulate->add_option("--out", out_dir, "Output directory (overrides config output_dir)");

    std::string dataset_path, json_path;
    auto* analyze = app.add_subcommand("analyze", "Analyze a dataset CSV");
    analyze->add_option("--dataset", dataset_path, "Dataset CSV path")->required();
    analyze->add_option("--json", json_path, "Also write the report as JSON");

    std::string log_path, staircase_arg;
    int participant = 0, block = 0, reversals_to_average = 3;
    auto* trace = app.add_subcommand("trace", "Print one staircase's stimulus series");
    trace->add_option("--log", log_path, "Trial log CSV path")->required();
    trace->add_option("--participant", participant, "Participant id")->required();
    trace->add_option("--block", block, "Block index (0 or 1)")->required();
    trace->add_option("--staircase", staircase_arg, "<fwd|back>:<upper|lower>")->required();
    trace->add_option("--avg", reversals_to_average, "Reversals averaged per staircase");

    std::string origin_s, selected_s, partner_s, zone_s;
    double threshold_override = -1.0, threshold_small = 1.33, threshold_large = 1.64;
    double range_cutoff = 5.0;
    auto* correct = app.add_subcommand("correct",
                                       "Backward-correct a teleport out of a partner's space");
    correct->add_option("--origin", origin_s, "Teleport origin 'x,y' (meters)")->required();
    correct->add_option("--selected", selected_s, "Selected destination 'x,y'")->required();
    correct->add_option("--partner", partner_s, "Partner position 'x,y'")->required();
    correct->add_option("--zone", zone_s, "Target zone: intimate|personal|social")->required();
    correct->add_option("--threshold", threshold_override,
                        "Backward budget in meters (overrides the per-range defaults)");
    correct->add_option("--threshold-small", threshold_small,
                        "Budget for teleports at or under the cutoff");
    correct->add_option("--threshold-large", threshold_large, "Budget for longer teleports");
    correct->add_option("--cutoff", range_cutoff, "Small/large teleport cutoff in meters");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, out_dir);
        if (analyze->parsed()) return cmd_analyze(dataset_path, json_path);
        if (trace->parsed())
            return cmd_trace(log_path, participant, block, staircase_arg, reversals_to_average);
        if (correct->parsed())
            return cmd_correct(origin_s, selected_s, partner_s, zone_s, threshold_override,
                               threshold_small, threshold_large, range_cutoff);
    } catch (const atp::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
