#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <vector>

#include "atp/error.hpp"
#include "atp/rng.hpp"

namespace atp {

// ---------------------------------------------------------------------------
// Interleaved 1-up-1-down staircase pair
//
// Two inner staircases run together for one condition: one starts above the
// expected threshold, one below. Each trial presents the chosen staircase's
// current stimulus; a detection lowers the stimulus, a miss raises it. The
// procedure converges at the 50% detection point, estimated from the last
// reversal values of both staircases.
// ---------------------------------------------------------------------------

enum class StaircaseId { Upper, Lower };

/// How the final threshold is pooled from reversal values.
/// PerStaircase: last `reversals_to_average` values of each inner staircase
/// (the default, 2 x 3 values). PooledPair: the last `reversals_to_average`
/// reversals across the pair in trial order.
enum class ThresholdAveraging { PerStaircase, PooledPair };

struct StaircaseConfig {
    double start_upper = 2.0;       // meters
    double start_lower = 0.8;       // meters
    double base_step = 0.2;         // meters
    int reversals_to_converge = 5;
    int reversals_to_average = 3;
    bool quick_start = true;        // doubled step until the first reversal
    double stimulus_floor = 0.0;    // meters
    double stimulus_ceiling = 2.5;  // meters; the range's maximum adjustment
    ThresholdAveraging averaging = ThresholdAveraging::PerStaircase;

    void validate() const {
        if (!(start_lower >= 0.0) || !(start_upper > start_lower))
            throw ConfigError("staircase: need start_upper > start_lower >= 0");
        if (!(base_step > 0.0)) throw ConfigError("staircase: base_step must be positive");
        if (reversals_to_converge < 1)
            throw ConfigError("staircase: reversals_to_converge must be >= 1");
        if (reversals_to_average < 1 || reversals_to_average > reversals_to_converge)
            throw ConfigError("staircase: need 1 <= reversals_to_average <= reversals_to_converge");
        if (!(stimulus_floor <= start_lower) || !(start_upper <= stimulus_ceiling))
            throw ConfigError("staircase: start values must lie within [floor, ceiling]");
    }
};

/// A stimulus value at which the movement direction flipped.
struct Reversal {
    double value;   // stimulus before the reversing move
    int pair_seq;   // response index within the pair, for pooled averaging
};

struct InnerStaircase {
    enum class Move { None, Up, Down };

    StaircaseId id = StaircaseId::Upper;
    double current_stimulus = 0.0;
    Move last_move = Move::None;
    std::vector<Reversal> reversals;
    bool in_quick_start = false;
    int trial_count = 0;

    bool converged(const StaircaseConfig& cfg) const {
        return static_cast<int>(reversals.size()) >= cfg.reversals_to_converge;
    }
};

struct StimulusRequest {
    StaircaseId id;
    double magnitude;  // meters
};

struct ThresholdEstimate {
    double value = 0.0;                          // meters
    std::array<double, 2> per_staircase_means{}; // upper, lower
    std::vector<double> reversal_values_used;
};

class StaircasePair {
public:
    explicit StaircasePair(StaircaseConfig cfg) : cfg_(cfg) {
        cfg_.validate();
        upper_.id = StaircaseId::Upper;
        upper_.current_stimulus = cfg_.start_upper;
        upper_.in_quick_start = cfg_.quick_start;
        lower_.id = StaircaseId::Lower;
        lower_.current_stimulus = cfg_.start_lower;
        lower_.in_quick_start = cfg_.quick_start;
    }

    const StaircaseConfig& config() const { return cfg_; }
    const InnerStaircase& upper() const { return upper_; }
    const InnerStaircase& lower() const { return lower_; }
    const InnerStaircase& inner(StaircaseId id) const {
        return id == StaircaseId::Upper ? upper_ : lower_;
    }

    bool converged() const { return upper_.converged(cfg_) && lower_.converged(cfg_); }

    /// Uniformly picks an unconverged inner staircase and returns its current
    /// stimulus; empty once both staircases are done.
    std::optional<StimulusRequest> next_stimulus(RngStream& rng) const {
        const bool upper_open = !upper_.converged(cfg_);
        const bool lower_open = !lower_.converged(cfg_);
        if (!upper_open && !lower_open) return std::nullopt;
        StaircaseId pick;
        if (upper_open && lower_open)
            pick = rng.uniform_int(2) == 0 ? StaircaseId::Upper : StaircaseId::Lower;
        else
            pick = upper_open ? StaircaseId::Upper : StaircaseId::Lower;
        return StimulusRequest{pick, inner(pick).current_stimulus};
    }

    struct ResponseOutcome {
        bool reversal_logged = false;
        bool staircase_converged = false;
    };

    /// Applies a detection response to the identified staircase: detected
    /// moves the stimulus down one step, not-detected moves it up. A response
    /// whose direction differs from the previous move logs a reversal at the
    /// pre-move stimulus; the first reversal ends the quick-start phase, after
    /// which steps stop being doubled.
    ResponseOutcome record_response(StaircaseId id, bool detected) {
        InnerStaircase& st = id == StaircaseId::Upper ? upper_ : lower_;
        if (st.converged(cfg_))
            throw StateError("record_response on a converged staircase");

        using Move = InnerStaircase::Move;
        const Move move = detected ? Move::Down : Move::Up;
        const bool reversal = st.last_move != Move::None && move != st.last_move;
        if (reversal) {
            st.reversals.push_back({st.current_stimulus, seq_});
            st.in_quick_start = false;
        }
        const double step = cfg_.base_step * (st.in_quick_start ? 2.0 : 1.0);
        const double moved = st.current_stimulus + (move == Move::Up ? step : -step);
        st.current_stimulus = std::clamp(moved, cfg_.stimulus_floor, cfg_.stimulus_ceiling);
        st.last_move = move;
        ++st.trial_count;
        ++seq_;
        return {reversal, st.converged(cfg_)};
    }

    /// Threshold as the mean of the pooled late reversal values.
    ThresholdEstimate estimate_threshold() const {
        if (!converged()) throw StateError("estimate_threshold before convergence");

        ThresholdEstimate est;
        est.per_staircase_means = {tail_mean(upper_), tail_mean(lower_)};
        if (cfg_.averaging == ThresholdAveraging::PerStaircase) {
            append_tail(upper_, est.reversal_values_used);
            append_tail(lower_, est.reversal_values_used);
        } else {
            std::vector<Reversal> all;
            all.insert(all.end(), upper_.reversals.begin(), upper_.reversals.end());
            all.insert(all.end(), lower_.reversals.begin(), lower_.reversals.end());
            std::sort(all.begin(), all.end(),
                      [](const Reversal& a, const Reversal& b) { return a.pair_seq < b.pair_seq; });
            const int skip = static_cast<int>(all.size()) - cfg_.reversals_to_average;
            for (int i = std::max(skip, 0); i < static_cast<int>(all.size()); ++i)
                est.reversal_values_used.push_back(all[i].value);
        }
        double sum = 0.0;
        for (double v : est.reversal_values_used) sum += v;
        est.value = sum / static_cast<double>(est.reversal_values_used.size());
        return est;
    }

private:
    double tail_mean(const InnerStaircase& st) const {
        const int n = cfg_.reversals_to_average;
        const int start = static_cast<int>(st.reversals.size()) - n;
        double sum = 0.0;
        for (int i = start; i < static_cast<int>(st.reversals.size()); ++i)
            sum += st.reversals[i].value;
        return sum / n;
    }

    void append_tail(const InnerStaircase& st, std::vector<double>& out) const {
        const int start = static_cast<int>(st.reversals.size()) - cfg_.reversals_to_average;
        for (int i = start; i < static_cast<int>(st.reversals.size()); ++i)
            out.push_back(st.reversals[i].value);
    }

    StaircaseConfig cfg_;
    InnerStaircase upper_;
    InnerStaircase lower_;
    int seq_ = 0;
};

}  // namespace atp
