#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "atp/dataset.hpp"
#include "atp/error.hpp"
#include "atp/stats.hpp"

namespace atp {

/// Participants x conditions threshold matrix (complete 2x2 within-subject
/// table per row).
using CellMatrix = std::vector<std::array<double, 4>>;

// ---------------------------------------------------------------------------
// Descriptives
// ---------------------------------------------------------------------------

struct Descriptives {
    int n = 0;
    double mean = 0.0, sd = 0.0;
    double min = 0.0, max = 0.0;
    double q1 = 0.0, median = 0.0, q3 = 0.0, iqr = 0.0;
    double fence_low = 0.0, fence_high = 0.0;
    std::vector<int> outlier_rows;  // indices into the input
};

namespace detail {
/// Linear-interpolation quantile (type 7) of sorted values.
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted.size()) return sorted[sorted.size() - 1];
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}
}  // namespace detail

/// Mean, SD, interpolated quartiles, and 3xIQR fence outliers.
inline Descriptives describe(std::span<const double> values) {
    if (values.empty()) throw ValidationError("describe: empty input");
    Descriptives d;
    d.n = static_cast<int>(values.size());
    d.mean = std::accumulate(values.begin(), values.end(), 0.0) / d.n;
    double ss = 0.0;
    for (double v : values) ss += (v - d.mean) * (v - d.mean);
    d.sd = d.n > 1 ? std::sqrt(ss / (d.n - 1)) : 0.0;

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    d.min = sorted.front();
    d.max = sorted.back();
    d.q1 = detail::quantile_sorted(sorted, 0.25);
    d.median = detail::quantile_sorted(sorted, 0.50);
    d.q3 = detail::quantile_sorted(sorted, 0.75);
    d.iqr = d.q3 - d.q1;
    d.fence_low = d.q1 - 3.0 * d.iqr;
    d.fence_high = d.q3 + 3.0 * d.iqr;
    for (int i = 0; i < d.n; ++i)
        if (values[i] < d.fence_low || values[i] > d.fence_high) d.outlier_rows.push_back(i);
    return d;
}

// ---------------------------------------------------------------------------
// Two-way repeated-measures ANOVA (direction x size, both two-level)
// ---------------------------------------------------------------------------

struct EffectResult {
    double F = 0.0;
    double df1 = 1.0, df2 = 0.0;
    double p = 1.0;
    double partial_eta_sq = 0.0;
    bool degenerate = false;  // zero error variance
};

struct AnovaResult {
    EffectResult direction, size, interaction;
};

namespace detail {

inline int dir_level(int c) { return c / 2; }   // 0 forward, 1 backward
inline int size_level(int c) { return c % 2; }  // 0 small, 1 large

inline void check_complete(const CellMatrix& data) {
    if (data.size() < 2) throw ValidationError("rm_anova_2x2: need at least 2 participants");
    for (const auto& row : data)
        for (double v : row)
            if (!std::isfinite(v)) throw ValidationError("rm_anova_2x2: missing or non-finite cell");
}

inline EffectResult effect_from_ss(double ss_effect, double ss_error, int n, double ss_scale) {
    EffectResult r;
    r.df1 = 1.0;
    r.df2 = static_cast<double>(n - 1);
    if (ss_error <= 1e-12 * ss_scale) {
        r.degenerate = true;
        if (ss_effect > 1e-12 * ss_scale) {
            r.F = std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.partial_eta_sq = 1.0;
        } else {
            r.F = std::numeric_limits<double>::quiet_NaN();
            r.p = 1.0;
            r.partial_eta_sq = std::numeric_limits<double>::quiet_NaN();
        }
        return r;
    }
    r.F = ss_effect / (ss_error / r.df2);
    r.p = f_tail_p(r.F, r.df1, r.df2);
    r.partial_eta_sq = ss_effect / (ss_effect + ss_error);
    return r;
}

}  // namespace detail

/// Classical within-subject decomposition: each effect is tested against its
/// own effect-by-subject interaction, df (1, n-1); partial eta^2 =
/// SS_effect / (SS_effect + SS_error).
inline AnovaResult rm_anova_2x2(const CellMatrix& data) {
    detail::check_complete(data);
    const int n = static_cast<int>(data.size());

    double grand = 0.0;
    std::array<double, 2> dir_mean{}, size_mean{};
    std::array<std::array<double, 2>, 2> cell_mean{};
    std::vector<double> subj_mean(n, 0.0);
    std::vector<std::array<double, 2>> subj_dir(n, {0.0, 0.0}), subj_size(n, {0.0, 0.0});

    for (int p = 0; p < n; ++p) {
        for (int c = 0; c < 4; ++c) {
            const double y = data[p][c];
            grand += y;
            dir_mean[detail::dir_level(c)] += y;
            size_mean[detail::size_level(c)] += y;
            cell_mean[detail::dir_level(c)][detail::size_level(c)] += y;
            subj_mean[p] += y;
            subj_dir[p][detail::dir_level(c)] += y;
            subj_size[p][detail::size_level(c)] += y;
        }
    }
    grand /= 4.0 * n;
    for (auto& v : dir_mean) v /= 2.0 * n;
    for (auto& v : size_mean) v /= 2.0 * n;
    for (auto& row : cell_mean)
        for (auto& v : row) v /= n;
    for (auto& v : subj_mean) v /= 4.0;
    for (auto& row : subj_dir)
        for (auto& v : row) v /= 2.0;
    for (auto& row : subj_size)
        for (auto& v : row) v /= 2.0;

    double ss_dir = 0.0, ss_size = 0.0, ss_int = 0.0;
    for (int i = 0; i < 2; ++i) {
        ss_dir += 2.0 * n * (dir_mean[i] - grand) * (dir_mean[i] - grand);
        ss_size += 2.0 * n * (size_mean[i] - grand) * (size_mean[i] - grand);
        for (int j = 0; j < 2; ++j) {
            const double dev = cell_mean[i][j] - dir_mean[i] - size_mean[j] + grand;
            ss_int += n * dev * dev;
        }
    }

    double ss_dir_err = 0.0, ss_size_err = 0.0, ss_int_err = 0.0, ss_total = 0.0;
    for (int p = 0; p < n; ++p) {
        for (int i = 0; i < 2; ++i) {
            const double dd = subj_dir[p][i] - subj_mean[p] - dir_mean[i] + grand;
            ss_dir_err += 2.0 * dd * dd;
            const double ds = subj_size[p][i] - subj_mean[p] - size_mean[i] + grand;
            ss_size_err += 2.0 * ds * ds;
        }
        for (int c = 0; c < 4; ++c) {
            const int i = detail::dir_level(c), j = detail::size_level(c);
            const double dev = data[p][c] - subj_dir[p][i] - subj_size[p][j] + subj_mean[p] -
                               cell_mean[i][j] + dir_mean[i] + size_mean[j] - grand;
            ss_int_err += dev * dev;
            ss_total += (data[p][c] - grand) * (data[p][c] - grand);
        }
    }

    AnovaResult result;
    result.direction = detail::effect_from_ss(ss_dir, ss_dir_err, n, ss_total);
    result.size = detail::effect_from_ss(ss_size, ss_size_err, n, ss_total);
    result.interaction = detail::effect_from_ss(ss_int, ss_int_err, n, ss_total);
    return result;
}

// ---------------------------------------------------------------------------
// Aligned rank transform
// ---------------------------------------------------------------------------

/// Per-effect aligned responses and their midranks. Alignment strips every
/// cell-mean effect estimate except the effect of interest; ranks are then
/// assigned over all aligned values.
struct ArtData {
    CellMatrix aligned_direction, aligned_size, aligned_interaction;
    CellMatrix ranked_direction, ranked_size, ranked_interaction;
};

namespace detail {
inline CellMatrix midrank(const CellMatrix& values) {
    const int n = static_cast<int>(values.size());
    std::vector<std::pair<double, int>> flat;
    flat.reserve(4 * n);
    for (int p = 0; p < n; ++p)
        for (int c = 0; c < 4; ++c) flat.emplace_back(values[p][c], p * 4 + c);
    std::sort(flat.begin(), flat.end());

    CellMatrix ranks(n);
    std::size_t i = 0;
    while (i < flat.size()) {
        std::size_t j = i;
        while (j + 1 < flat.size() && flat[j + 1].first == flat[i].first) ++j;
        const double rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            ranks[flat[k].second / 4][flat[k].second % 4] = rank;
        i = j + 1;
    }
    return ranks;
}
}  // namespace detail

inline ArtData align_rank_transform(const CellMatrix& data) {
    if (data.empty()) throw ValidationError("align_rank_transform: empty input");
    for (const auto& row : data)
        for (double v : row)
            if (!std::isfinite(v))
                throw ValidationError("align_rank_transform: missing or non-finite cell");
    const int n = static_cast<int>(data.size());

    double grand = 0.0;
    std::array<double, 2> dir_mean{}, size_mean{};
    std::array<double, 4> cell_mean{};
    for (const auto& row : data)
        for (int c = 0; c < 4; ++c) {
            grand += row[c];
            dir_mean[detail::dir_level(c)] += row[c];
            size_mean[detail::size_level(c)] += row[c];
            cell_mean[c] += row[c];
        }
    grand /= 4.0 * n;
    for (auto& v : dir_mean) v /= 2.0 * n;
    for (auto& v : size_mean) v /= 2.0 * n;
    for (auto& v : cell_mean) v /= n;

    ArtData art;
    art.aligned_direction.resize(n);
    art.aligned_size.resize(n);
    art.aligned_interaction.resize(n);
    for (int p = 0; p < n; ++p) {
        for (int c = 0; c < 4; ++c) {
            const int i = detail::dir_level(c), j = detail::size_level(c);
            const double residual = data[p][c] - cell_mean[c];
            art.aligned_direction[p][c] = residual + (dir_mean[i] - grand);
            art.aligned_size[p][c] = residual + (size_mean[j] - grand);
            art.aligned_interaction[p][c] =
                residual + (cell_mean[c] - dir_mean[i] - size_mean[j] + grand);
        }
    }
    art.ranked_direction = detail::midrank(art.aligned_direction);
    art.ranked_size = detail::midrank(art.aligned_size);
    art.ranked_interaction = detail::midrank(art.aligned_interaction);
    return art;
}

/// ART ANOVA: ranks each per-effect aligned dataset and reads that effect's
/// test from a repeated-measures ANOVA on the ranks.
inline AnovaResult art_anova(const CellMatrix& data) {
    const ArtData art = align_rank_transform(data);
    AnovaResult result;
    result.direction = rm_anova_2x2(art.ranked_direction).direction;
    result.size = rm_anova_2x2(art.ranked_size).size;
    result.interaction = rm_anova_2x2(art.ranked_interaction).interaction;
    return result;
}

// ---------------------------------------------------------------------------
// Correlations
// ---------------------------------------------------------------------------

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;
};

inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("pearson: length mismatch");
    const int n = static_cast<int>(x.size());
    if (n < 3) throw ValidationError("pearson: need at least 3 pairs");
    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0)
        throw ValidationError("pearson: undefined correlation (zero variance)");
    PearsonResult result;
    result.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    if (std::fabs(result.r) >= 1.0) {
        result.p = 0.0;
    } else {
        const double df = n - 2;
        const double t = result.r * std::sqrt(df / (1.0 - result.r * result.r));
        result.p = student_t_two_sided_p(t, df);
    }
    return result;
}

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
inline std::vector<double> bh_fdr(const std::vector<double>& p_values) {
    for (double p : p_values)
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("bh_fdr: p-values must be in [0, 1]");
    const int m = static_cast<int>(p_values.size());
    std::vector<int> order(m);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return p_values[a] < p_values[b]; });

    std::vector<double> adjusted(m);
    double running = 1.0;
    for (int k = m - 1; k >= 0; --k) {
        const double q = p_values[order[k]] * m / static_cast<double>(k + 1);
        running = std::min(running, q);
        adjusted[order[k]] = running;
    }
    return adjusted;
}

// ---------------------------------------------------------------------------
// Trait questionnaire scoring
// ---------------------------------------------------------------------------

inline constexpr int kSbsodItems = 15;

/// Sense-of-direction score: reverse-marked items map r -> 8 - r, then the
/// mean over all 15 items (1 = poor, 7 = good).
inline double sbsod_score(std::span<const int> responses, const std::vector<bool>& reverse_mask) {
    if (responses.size() != kSbsodItems || reverse_mask.size() != kSbsodItems)
        throw ValidationError("sbsod_score: expected 15 responses and 15 mask entries");
    double sum = 0.0;
    for (int i = 0; i < kSbsodItems; ++i) {
        if (responses[i] < 1 || responses[i] > 7)
            throw ValidationError("sbsod_score: responses must be in 1..7");
        sum += reverse_mask[i] ? 8 - responses[i] : responses[i];
    }
    return sum / kSbsodItems;
}

/// Mean absolute angular error in degrees, with wraparound at 360.
inline double sot_error_score(std::span<const double> responses, std::span<const double> correct) {
    if (responses.size() != correct.size() || responses.empty())
        throw ValidationError("sot_error_score: need equal-length non-empty inputs");
    double sum = 0.0;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        const double d = std::fmod(std::fabs(responses[i] - correct[i]), 360.0);
        sum += std::min(d, 360.0 - d);
    }
    return sum / static_cast<double>(responses.size());
}

// ---------------------------------------------------------------------------
// Dataset-level report
// ---------------------------------------------------------------------------

struct CorrelationCell {
    double r = std::numeric_limits<double>::quiet_NaN();
    double p = std::numeric_limits<double>::quiet_NaN();
    double p_adjusted = std::numeric_limits<double>::quiet_NaN();
    bool defined = false;
    bool starred = false;
};

inline constexpr std::array<const char*, 3> kTraitNames{"sot_error", "sbsod", "vr_experience"};

/// Pearson correlations of the three trait measures against the four
/// condition thresholds, with BH-FDR adjustment across all defined cells;
/// stars mark adjusted p < 0.05.
struct CorrelationTable {
    bool sufficient_n = false;  // needs >= 3 included rows
    int n = 0;
    std::array<std::array<CorrelationCell, 4>, 3> cells{};
};

inline CorrelationTable compute_correlation_table(const ExperimentDataset& dataset) {
    CorrelationTable table;
    std::array<std::vector<double>, 3> traits;
    std::array<std::vector<double>, 4> thresholds;
    for (const auto& row : dataset.rows) {
        if (!row.included) continue;
        traits[0].push_back(row.sot_error);
        traits[1].push_back(row.sbsod);
        traits[2].push_back(static_cast<double>(row.vr_experience));
        for (int c = 0; c < 4; ++c) thresholds[c].push_back(row.threshold[c]);
    }
    table.n = static_cast<int>(traits[0].size());
    table.sufficient_n = table.n >= 3;
    if (!table.sufficient_n) return table;

    std::vector<double> raw_p;
    std::vector<std::pair<int, int>> defined_cells;
    for (int t = 0; t < 3; ++t) {
        for (int c = 0; c < 4; ++c) {
            try {
                const PearsonResult pr = pearson(traits[t], thresholds[c]);
                table.cells[t][c].r = pr.r;
                table.cells[t][c].p = pr.p;
                table.cells[t][c].defined = true;
                raw_p.push_back(pr.p);
                defined_cells.emplace_back(t, c);
            } catch (const ValidationError&) {
                // zero-variance column: cell stays undefined
            }
        }
    }
    if (!raw_p.empty()) {
        const std::vector<double> adjusted = bh_fdr(raw_p);
        for (std::size_t i = 0; i < defined_cells.size(); ++i) {
            auto [t, c] = defined_cells[i];
            table.cells[t][c].p_adjusted = adjusted[i];
            table.cells[t][c].starred = adjusted[i] < 0.05;
        }
    }
    return table;
}

struct AnalysisReport {
    int n_total = 0;
    int n_included = 0;
    std::array<Descriptives, 4> condition_stats{};
    bool anova_valid = false;
    AnovaResult art;
    AnovaResult raw;
    CorrelationTable correlations;
};

inline AnalysisReport analyze_dataset(const ExperimentDataset& dataset) {
    AnalysisReport report;
    report.n_total = static_cast<int>(dataset.rows.size());
    report.n_included = dataset.included_count();
    if (report.n_included < 1)
        throw ValidationError("analyze_dataset: no included participants");
    for (const auto& row : dataset.rows) {
        if (!row.included) continue;
        for (double v : row.threshold)
            if (!std::isfinite(v))
                throw ValidationError("analyze_dataset: included participant " +
                                      std::to_string(row.participant_id) +
                                      " has a non-finite threshold");
    }

    const CellMatrix cells = dataset.included_thresholds();
    for (int c = 0; c < 4; ++c) {
        std::vector<double> column;
        column.reserve(cells.size());
        for (const auto& row : cells) column.push_back(row[c]);
        report.condition_stats[c] = describe(column);
    }
    report.anova_valid = report.n_included >= 2;
    if (report.anova_valid) {
        report.raw = rm_anova_2x2(cells);
        report.art = art_anova(cells);
    }
    report.correlations = compute_correlation_table(dataset);
    return report;
}

}  // namespace atp
