#pragma once

#include <array>
#include <concepts>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "atp/dataset.hpp"
#include "atp/error.hpp"
#include "atp/geometry.hpp"
#include "atp/observer.hpp"
#include "atp/rng.hpp"
#include "atp/staircase.hpp"

namespace atp {

// ---------------------------------------------------------------------------
// Block and experiment orchestration
//
// A block runs one teleport range: ten unadjusted training trials, then a
// random interleave of the forward staircase pair, the backward staircase
// pair, and ten unadjusted catch trials. The block ends when both pairs have
// converged and all catch trials are spent (or the trial cap is hit).
// ---------------------------------------------------------------------------

/// Anything that can stand in for a participant.
template <typename R>
concept Responder = requires(const R r, TrialKind k, Condition c, double magnitude,
                             Position2 center, double radius, RngStream& rng) {
    { r.respond(k, c, magnitude, rng) } -> std::convertible_to<bool>;
    { r.select_destination(center, radius, rng) } -> std::convertible_to<Position2>;
};

struct BlockConfig {
    TeleportRange range = TeleportRange::small();
    int training_trials = 10;
    int catch_trials = 10;
    double catch_pass_fraction = 0.70;
    int max_trials = 400;  // hard cap so degenerate responders cannot loop forever
    StaircaseConfig staircase;

    /// Block for a range, with the staircase ceiling bound to the range's
    /// maximum adjustment.
    static BlockConfig for_range(TeleportRange r, StaircaseConfig base = {}) {
        BlockConfig cfg;
        cfg.range = r;
        base.stimulus_ceiling = r.max_adjustment;
        cfg.staircase = base;
        return cfg;
    }

    void validate() const {
        range.validate();
        staircase.validate();
        if (training_trials < 0 || catch_trials < 0)
            throw ConfigError("block: trial counts must be non-negative");
        if (!(catch_pass_fraction > 0.0) || catch_pass_fraction > 1.0)
            throw ConfigError("block: catch_pass_fraction must be in (0, 1]");
        if (max_trials < 1) throw ConfigError("block: max_trials must be positive");
    }
};

struct TrialRecord {
    int participant_id = 0;
    int block_index = 0;
    RangeClass block_range = RangeClass::Small;
    int trial_index = 0;
    TrialKind kind = TrialKind::Training;
    std::optional<StaircaseId> staircase_id;
    int zone_index = 0;
    Position2 origin, selected, adjusted;
    double commanded_magnitude = 0.0;
    double effective_magnitude = 0.0;
    bool response_detected = false;
    bool reversal_logged = false;
    std::uint64_t rng_cursor = 0;  // stream position before the trial's draws
};

inline std::optional<AdjustmentDirection> trial_direction(TrialKind k) {
    if (k == TrialKind::StaircaseForward) return AdjustmentDirection::Forward;
    if (k == TrialKind::StaircaseBackward) return AdjustmentDirection::Backward;
    return std::nullopt;
}

struct BlockResult {
    std::optional<ThresholdEstimate> threshold_forward;
    std::optional<ThresholdEstimate> threshold_backward;
    bool forward_converged = false;
    bool backward_converged = false;
    int catch_correct = 0;
    int catch_total = 0;
    bool excluded = false;
    std::vector<TrialRecord> trials;

    const std::optional<ThresholdEstimate>& threshold(AdjustmentDirection d) const {
        return d == AdjustmentDirection::Forward ? threshold_forward : threshold_backward;
    }
};

/// Scores catch trials: a catch trial is answered correctly when no
/// adjustment is reported (the participant affirmed landing where selected).
inline std::pair<int, bool> evaluate_catch(std::span<const TrialRecord> records,
                                           double pass_fraction = 0.70) {
    if (records.empty()) throw ValidationError("evaluate_catch: no catch trials");
    int correct = 0;
    for (const auto& r : records) {
        if (r.kind != TrialKind::Catch)
            throw ValidationError("evaluate_catch: non-catch record in input");
        correct += r.response_detected ? 0 : 1;
    }
    const bool excluded =
        static_cast<double>(correct) / static_cast<double>(records.size()) < pass_fraction;
    return {correct, excluded};
}

template <typename R>
    requires Responder<R>
BlockResult run_block(const BlockConfig& cfg, const R& responder, RngStream& rng,
                      int participant_id = 0, int block_index = 0) {
    cfg.validate();
    const RoomLayout layout = build_layout(cfg.range);
    const Position2 origin{0.0, 0.0};  // trials start from the room center

    StaircasePair forward(cfg.staircase);
    StaircasePair backward(cfg.staircase);

    BlockResult result;
    int trial_index = 0;
    int catch_remaining = cfg.catch_trials;

    auto make_trial = [&](TrialKind kind) {
        TrialRecord rec;
        rec.participant_id = participant_id;
        rec.block_index = block_index;
        rec.block_range = cfg.range.kind;
        rec.trial_index = trial_index++;
        rec.kind = kind;
        rec.origin = origin;
        rec.rng_cursor = rng.cursor();
        return rec;
    };

    auto place_destination = [&](TrialRecord& rec) {
        rec.zone_index = rng.uniform_int(4);
        rec.selected = responder.select_destination(layout.zone_centers[rec.zone_index],
                                                    cfg.range.zone_radius, rng);
    };

    auto run_control_trial = [&](TrialKind kind) {
        TrialRecord rec = make_trial(kind);
        place_destination(rec);
        rec.adjusted = rec.selected;  // no adjustment on training/catch trials
        const Condition cond = condition_of(AdjustmentDirection::Forward, cfg.range.kind);
        rec.response_detected = responder.respond(kind, cond, 0.0, rng);
        result.trials.push_back(rec);
    };

    for (int i = 0; i < cfg.training_trials; ++i) run_control_trial(TrialKind::Training);

    while (static_cast<int>(result.trials.size()) < cfg.max_trials) {
        // Candidate trial kinds, drawn uniformly: each open staircase pair
        // plus the catch condition while any catch trials remain.
        std::array<TrialKind, 3> open{};
        int n_open = 0;
        if (!forward.converged()) open[n_open++] = TrialKind::StaircaseForward;
        if (!backward.converged()) open[n_open++] = TrialKind::StaircaseBackward;
        if (catch_remaining > 0) open[n_open++] = TrialKind::Catch;
        if (n_open == 0) break;

        const TrialKind kind = open[n_open == 1 ? 0 : rng.uniform_int(n_open)];
        if (kind == TrialKind::Catch) {
            run_control_trial(TrialKind::Catch);
            --catch_remaining;
            continue;
        }

        const AdjustmentDirection dir = *trial_direction(kind);
        StaircasePair& pair = dir == AdjustmentDirection::Forward ? forward : backward;
        const auto request = *pair.next_stimulus(rng);

        TrialRecord rec = make_trial(kind);
        rec.staircase_id = request.id;
        place_destination(rec);
        rec.commanded_magnitude = request.magnitude;
        rec.effective_magnitude =
            clamp_magnitude(rec.origin, rec.selected, dir, request.magnitude, cfg.range);
        rec.adjusted = adjust_destination(rec.origin, rec.selected, dir, rec.effective_magnitude);

        const Condition cond = condition_of(dir, cfg.range.kind);
        rec.response_detected = responder.respond(kind, cond, rec.effective_magnitude, rng);
        rec.reversal_logged = pair.record_response(request.id, rec.response_detected).reversal_logged;
        result.trials.push_back(rec);
    }

    result.forward_converged = forward.converged();
    result.backward_converged = backward.converged();
    if (result.forward_converged) result.threshold_forward = forward.estimate_threshold();
    if (result.backward_converged) result.threshold_backward = backward.estimate_threshold();

    std::vector<TrialRecord> catch_records;
    for (const auto& t : result.trials)
        if (t.kind == TrialKind::Catch) catch_records.push_back(t);
    result.catch_total = static_cast<int>(catch_records.size());
    if (!catch_records.empty()) {
        auto [correct, excluded] = evaluate_catch(catch_records, cfg.catch_pass_fraction);
        result.catch_correct = correct;
        result.excluded = excluded;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Whole experiment: two counterbalanced blocks per participant
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    BlockConfig block_small = BlockConfig::for_range(TeleportRange::small());
    BlockConfig block_large = BlockConfig::for_range(TeleportRange::large());
};

struct ExperimentResult {
    ExperimentDataset dataset;
    std::vector<TrialRecord> trials;
};

/// Runs n participants sampled from the population. Block order alternates
/// with participant parity (even ids run the small range first). A
/// participant is excluded from analysis when their pooled catch score falls
/// below the pass fraction or any staircase failed to converge.
inline ExperimentResult run_experiment(int n_participants, const Population& population,
                                       std::uint64_t seed,
                                       const ExperimentConfig& cfg = ExperimentConfig{}) {
    if (n_participants < 1) throw ConfigError("experiment: n_participants must be >= 1");
    cfg.block_small.validate();
    cfg.block_large.validate();

    ExperimentResult result;
    const RngStream root(seed);
    for (int p = 0; p < n_participants; ++p) {
        RngStream stream = root.child(static_cast<std::uint64_t>(p));
        const ObserverModel observer = population.sample(stream);

        const bool small_first = p % 2 == 0;
        std::array<const BlockConfig*, 2> order{&cfg.block_small, &cfg.block_large};
        if (!small_first) std::swap(order[0], order[1]);

        ParticipantRow row;
        row.participant_id = p;
        row.sot_error = observer.sot_error;
        row.sbsod = observer.sbsod;
        row.vr_experience = observer.vr_experience;

        int catch_correct = 0, catch_total = 0;
        bool all_converged = true;
        for (int b = 0; b < 2; ++b) {
            const BlockConfig& block_cfg = *order[b];
            BlockResult block = run_block(block_cfg, observer, stream, p, b);
            catch_correct += block.catch_correct;
            catch_total += block.catch_total;
            all_converged = all_converged && block.forward_converged && block.backward_converged;
            for (auto dir : {AdjustmentDirection::Forward, AdjustmentDirection::Backward}) {
                const int c = static_cast<int>(condition_of(dir, block_cfg.range.kind));
                const auto& est = block.threshold(dir);
                row.threshold[c] = est ? est->value : std::numeric_limits<double>::quiet_NaN();
            }
            result.trials.insert(result.trials.end(), block.trials.begin(), block.trials.end());
        }

        const double pass = cfg.block_small.catch_pass_fraction;
        const bool catch_ok =
            catch_total == 0 ||
            static_cast<double>(catch_correct) / static_cast<double>(catch_total) >= pass;
        row.included = catch_ok && all_converged;
        result.dataset.rows.push_back(row);
    }
    return result;
}

}  // namespace atp
