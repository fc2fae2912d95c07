#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "atp/geometry.hpp"

namespace atp {

/// One participant's outcome: four condition thresholds plus trait scores.
/// Excluded participants (failed catch trials or non-converged staircases)
/// are carried with included = false; their thresholds may be NaN.
struct ParticipantRow {
    int participant_id = 0;
    bool included = true;
    std::array<double, 4> threshold{};  // meters, indexed by Condition
    double sot_error = 0.0;             // degrees
    double sbsod = 0.0;                 // 1..7
    int vr_experience = 0;              // 1..5
};

struct ExperimentDataset {
    std::vector<ParticipantRow> rows;

    int included_count() const {
        int n = 0;
        for (const auto& r : rows) n += r.included ? 1 : 0;
        return n;
    }

    /// Threshold matrix (participants x conditions) over included rows.
    std::vector<std::array<double, 4>> included_thresholds() const {
        std::vector<std::array<double, 4>> out;
        for (const auto& r : rows)
            if (r.included) out.push_back(r.threshold);
        return out;
    }
};

}  // namespace atp
