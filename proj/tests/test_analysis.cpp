#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "atp/analysis.hpp"
#include "atp/rng.hpp"
#include "oracles.hpp"

using namespace atp;
using Catch::Approx;

namespace {

CellMatrix random_matrix(RngStream& rng, int n, double effect_dir = 0.0, double effect_size = 0.0,
                         double noise = 1.0) {
    CellMatrix data(n);
    for (auto& row : data) {
        const double base = rng.normal(0.0, 1.0);
        for (int c = 0; c < 4; ++c) {
            row[c] = base + rng.normal(0.0, noise);
            if (c / 2 == 1) row[c] += effect_dir;
            if (c % 2 == 1) row[c] += effect_size;
        }
    }
    return data;
}

ExperimentDataset make_dataset(const CellMatrix& thresholds, std::vector<double> sot = {},
                               std::vector<double> sbsod = {}, std::vector<int> vr = {}) {
    ExperimentDataset ds;
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        ParticipantRow row;
        row.participant_id = static_cast<int>(i);
        row.threshold = thresholds[i];
        row.sot_error = sot.empty() ? 30.0 : sot[i];
        row.sbsod = sbsod.empty() ? 4.0 : sbsod[i];
        row.vr_experience = vr.empty() ? 3 : vr[i];
        ds.rows.push_back(row);
    }
    return ds;
}

}  // namespace

TEST_CASE("descriptives") {
    SECTION("constant column") {
        const std::vector<double> v{2.5, 2.5, 2.5, 2.5};
        const Descriptives d = describe(v);
        CHECK(d.mean == 2.5);
        CHECK(d.sd == 0.0);
        CHECK(d.outlier_rows.empty());
    }
    SECTION("interpolated quartiles and the 3xIQR fence") {
        const std::vector<double> v{1, 2, 3, 4, 100};
        const Descriptives d = describe(v);
        CHECK(d.q1 == Approx(2.0));
        CHECK(d.median == Approx(3.0));
        CHECK(d.q3 == Approx(4.0));
        CHECK(d.fence_high == Approx(10.0));
        REQUIRE(d.outlier_rows.size() == 1);
        CHECK(d.outlier_rows[0] == 4);
    }
    SECTION("empty input") {
        CHECK_THROWS_AS(describe(std::vector<double>{}), ValidationError);
    }
}

TEST_CASE("repeated-measures ANOVA matches the contrast-based oracle") {
    RngStream rng(606);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 4 + rng.uniform_int(8);
        const CellMatrix data = random_matrix(rng, n, rng.uniform(-1, 1), rng.uniform(-1, 1), 0.7);
        const AnovaResult ours = rm_anova_2x2(data);
        const AnovaResult ref = oracle::rm_anova_by_contrasts(data);
        for (auto pick : {&AnovaResult::direction, &AnovaResult::size, &AnovaResult::interaction}) {
            const EffectResult& a = ours.*pick;
            const EffectResult& b = ref.*pick;
            CHECK(a.df2 == b.df2);
            CHECK(a.F == Approx(b.F).margin(1e-9).epsilon(1e-9));
            CHECK(a.p == Approx(b.p).margin(1e-9));
            CHECK(a.partial_eta_sq == Approx(b.partial_eta_sq).margin(1e-9));
        }
    }
}

TEST_CASE("four-participant worked table") {
    const CellMatrix data{{1.0, 1.2, 1.5, 1.9}, {0.8, 1.1, 1.4, 1.6},
                          {1.1, 1.3, 1.6, 2.0}, {0.9, 1.0, 1.2, 1.7}};
    const AnovaResult ours = rm_anova_2x2(data);
    const AnovaResult ref = oracle::rm_anova_by_contrasts(data);
    CHECK(ours.direction.F == Approx(ref.direction.F).margin(1e-9));
    CHECK(ours.size.F == Approx(ref.size.F).margin(1e-9));
    CHECK(ours.interaction.F == Approx(ref.interaction.F).margin(1e-9));
    CHECK(ours.direction.df1 == 1.0);
    CHECK(ours.direction.df2 == 3.0);
}

TEST_CASE("ANOVA flags zero error variance") {
    // identical direction shift for every participant: no residual variance
    CellMatrix data(5);
    for (int p = 0; p < 5; ++p) {
        const double base = 0.3 * p;
        data[p] = {base, base, base + 1.0, base + 1.0};
    }
    const AnovaResult r = rm_anova_2x2(data);
    CHECK(r.direction.degenerate);
    CHECK(std::isinf(r.direction.F));
    CHECK(r.direction.p == 0.0);
    CHECK(r.size.degenerate);  // zero effect and zero error

    // with a trace of noise the direction effect dominates and size does not
    RngStream rng(11);
    CellMatrix noisy = data;
    for (auto& row : noisy)
        for (auto& v : row) v += rng.normal(0.0, 1e-3);
    const AnovaResult nr = rm_anova_2x2(noisy);
    CHECK(!nr.direction.degenerate);
    CHECK(nr.direction.p < 1e-10);
    CHECK(nr.size.p > 0.2);
}

TEST_CASE("ANOVA is invariant to per-participant constants") {
    RngStream rng(77);
    const CellMatrix data = random_matrix(rng, 12, 0.4, 0.2, 0.5);
    CellMatrix shifted = data;
    for (std::size_t p = 0; p < shifted.size(); ++p)
        for (auto& v : shifted[p]) v += 10.0 * static_cast<double>(p + 1);
    const AnovaResult a = rm_anova_2x2(data);
    const AnovaResult b = rm_anova_2x2(shifted);
    CHECK(a.direction.F == Approx(b.direction.F).margin(1e-9));
    CHECK(a.size.F == Approx(b.size.F).margin(1e-9));
    CHECK(a.interaction.F == Approx(b.interaction.F).margin(1e-9));
}

TEST_CASE("ANOVA input validation") {
    CHECK_THROWS_AS(rm_anova_2x2(CellMatrix{{1, 2, 3, 4}}), ValidationError);
    CellMatrix with_nan{{1, 2, 3, 4}, {1, 2, 3, std::nan("")}};
    CHECK_THROWS_AS(rm_anova_2x2(with_nan), ValidationError);
}

TEST_CASE("aligned rank transform") {
    SECTION("pure direction shift separates direction ranks and ties size ranks") {
        CellMatrix data(6);
        for (auto& row : data) row = {1.0, 1.0, 2.0, 2.0};  // +1 for backward
        const ArtData art = align_rank_transform(data);
        // direction-aligned ranks: all backward cells above all forward cells
        double max_forward = 0.0, min_backward = 1e9;
        for (const auto& row : art.ranked_direction) {
            max_forward = std::max({max_forward, row[0], row[1]});
            min_backward = std::min({min_backward, row[2], row[3]});
        }
        CHECK(max_forward < min_backward);
        // size-aligned values carry no size information: all ranks tied
        const double first = art.ranked_size[0][0];
        for (const auto& row : art.ranked_size)
            for (double v : row) CHECK(v == first);
    }
    SECTION("all-equal data ranks fully tied") {
        CellMatrix data(4);
        for (auto& row : data) row = {3.0, 3.0, 3.0, 3.0};
        const ArtData art = align_rank_transform(data);
        for (const auto& row : art.ranked_interaction)
            for (double v : row) CHECK(v == Approx((4 * 4 + 1) / 2.0));
    }
    SECTION("aligned values sum to zero and match the hand-rolled oracle") {
        RngStream rng(3030);
        for (int trial = 0; trial < 25; ++trial) {
            const int n = 3 + rng.uniform_int(9);
            const CellMatrix data = random_matrix(rng, n, 0.3, -0.2, 1.0);
            const ArtData art = align_rank_transform(data);

            double scale = 0.0;
            for (const auto& row : data)
                for (double v : row) scale = std::max(scale, std::fabs(v));
            for (const auto* matrix :
                 {&art.aligned_direction, &art.aligned_size, &art.aligned_interaction}) {
                double sum = 0.0;
                for (const auto& row : *matrix)
                    for (double v : row) sum += v;
                CHECK(std::fabs(sum) <= 1e-9 * std::max(scale, 1.0));
            }

            const auto ref_dir = oracle::art_by_hand(data, oracle::ArtEffect::Direction);
            const auto ref_size = oracle::art_by_hand(data, oracle::ArtEffect::Size);
            const auto ref_int = oracle::art_by_hand(data, oracle::ArtEffect::Interaction);
            for (int p = 0; p < n; ++p) {
                for (int c = 0; c < 4; ++c) {
                    CHECK(art.aligned_direction[p][c] ==
                          Approx(ref_dir.aligned[p][c]).margin(1e-9));
                    CHECK(art.ranked_direction[p][c] == ref_dir.ranked[p][c]);
                    CHECK(art.aligned_size[p][c] == Approx(ref_size.aligned[p][c]).margin(1e-9));
                    CHECK(art.ranked_size[p][c] == ref_size.ranked[p][c]);
                    CHECK(art.aligned_interaction[p][c] ==
                          Approx(ref_int.aligned[p][c]).margin(1e-9));
                    CHECK(art.ranked_interaction[p][c] == ref_int.ranked[p][c]);
                }
            }
        }
    }
}

TEST_CASE("ART ANOVA detects the shifted effect and not the orthogonal one") {
    RngStream rng(40414);
    const double delta = 1.0;
    const CellMatrix data = random_matrix(rng, 31, delta, 0.0, 0.1 * delta);
    const AnovaResult r = art_anova(data);
    CHECK(r.direction.p < 0.001);
    CHECK(r.size.p > 0.2);
}

TEST_CASE("pearson correlation") {
    SECTION("perfect linearity") {
        const std::vector<double> x{1, 2, 3}, y{2, 4, 6};
        const PearsonResult r = pearson(x, y);
        CHECK(r.r == Approx(1.0));
        CHECK(r.p == Approx(0.0).margin(1e-12));
    }
    SECTION("orthogonal zero-mean vectors") {
        const std::vector<double> x{1, 0, -1, 0}, y{0, 1, 0, -1};
        CHECK(pearson(x, y).r == Approx(0.0).margin(1e-15));
    }
    SECTION("affine invariance") {
        RngStream rng(8);
        std::vector<double> x(20), y(20);
        for (int i = 0; i < 20; ++i) {
            x[i] = rng.normal();
            y[i] = 0.6 * x[i] + rng.normal();
        }
        std::vector<double> x2(20), y2(20);
        for (int i = 0; i < 20; ++i) {
            x2[i] = 3.7 * x[i] - 11.0;
            y2[i] = 0.002 * y[i] + 5.0;
        }
        CHECK(pearson(x, y).r == Approx(pearson(x2, y2).r).margin(1e-12));
    }
    SECTION("p-value matches the quadrature oracle") {
        RngStream rng(9);
        std::vector<double> x(15), y(15);
        for (int i = 0; i < 15; ++i) {
            x[i] = rng.normal();
            y[i] = 0.4 * x[i] + rng.normal();
        }
        const PearsonResult r = pearson(x, y);
        const double t = r.r * std::sqrt((15 - 2) / (1.0 - r.r * r.r));
        CHECK(r.p == Approx(oracle::t_two_sided_p(t, 13)).margin(1e-9));
    }
    SECTION("errors") {
        const std::vector<double> short_x{1, 2}, short_y{2, 3};
        CHECK_THROWS_AS(pearson(short_x, short_y), ValidationError);
        const std::vector<double> flat{1, 1, 1}, rising{1, 2, 3};
        CHECK_THROWS_AS(pearson(flat, rising), ValidationError);
    }
}

TEST_CASE("Benjamini-Hochberg adjustment") {
    SECTION("worked example") {
        const std::vector<double> p{0.01, 0.02, 0.04, 0.05};
        const std::vector<double> adj = bh_fdr(p);
        CHECK(adj[0] == Approx(0.04).margin(1e-12));
        CHECK(adj[1] == Approx(0.04).margin(1e-12));
        CHECK(adj[2] == Approx(0.05).margin(1e-12));
        CHECK(adj[3] == Approx(0.05).margin(1e-12));
    }
    SECTION("single p unchanged") {
        CHECK(bh_fdr({0.37})[0] == Approx(0.37));
    }
    SECTION("all equal p stay at that value") {
        const std::vector<double> p{0.03, 0.03, 0.03, 0.03, 0.03};
        const auto adj = bh_fdr(p);
        const auto ref = oracle::bh_by_hand(p);
        for (int i = 0; i < 5; ++i) {
            CHECK(adj[i] == Approx(ref[i]).margin(1e-12));
            CHECK(adj[i] == Approx(0.03).margin(1e-12));
        }
    }
    SECTION("matches the direct-formula oracle on random vectors") {
        RngStream rng(606060);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> p(1 + rng.uniform_int(12));
            for (auto& v : p) v = rng.uniform();
            if (trial % 3 == 0 && p.size() > 2) p[1] = p[0];  // exercise ties
            const auto adj = bh_fdr(p);
            const auto ref = oracle::bh_by_hand(p);
            for (std::size_t i = 0; i < p.size(); ++i)
                CHECK(adj[i] == Approx(ref[i]).margin(1e-12));
        }
    }
    SECTION("order preservation and capping") {
        RngStream rng(515);
        std::vector<double> p(10);
        for (auto& v : p) v = rng.uniform();
        const auto adj = bh_fdr(p);
        for (std::size_t i = 0; i < p.size(); ++i) {
            CHECK(adj[i] <= 1.0);
            for (std::size_t j = 0; j < p.size(); ++j)
                if (p[i] < p[j]) CHECK(adj[i] <= adj[j] + 1e-15);
        }
    }
    SECTION("rejects out-of-range p") {
        CHECK_THROWS_AS(bh_fdr({0.5, 1.2}), ValidationError);
    }
}

TEST_CASE("questionnaire scoring") {
    std::vector<int> responses(15, 7);
    std::vector<bool> no_reverse(15, false), all_reverse(15, true);
    CHECK(sbsod_score(responses, no_reverse) == Approx(7.0));
    CHECK(sbsod_score(responses, all_reverse) == Approx(1.0));
    std::vector<int> mid(15, 4);
    std::vector<bool> mixed(15, false);
    mixed[3] = mixed[7] = true;
    CHECK(sbsod_score(mid, mixed) == Approx(4.0));  // 4 is the fixed point
    std::vector<int> bad(15, 4);
    bad[0] = 9;
    CHECK_THROWS_AS(sbsod_score(bad, no_reverse), ValidationError);

    const std::vector<double> resp{10.0, 350.0}, corr{0.0, 0.0};
    CHECK(sot_error_score(resp, corr) == Approx(10.0));
    CHECK(sot_error_score(corr, corr) == Approx(0.0));
    const std::vector<double> anti{180.0}, zero{0.0};
    CHECK(sot_error_score(anti, zero) == Approx(180.0));
    CHECK_THROWS_AS(sot_error_score(std::vector<double>{}, std::vector<double>{}),
                    ValidationError);
}

TEST_CASE("correlation table and dataset report") {
    SECTION("strong injected correlation is starred") {
        RngStream rng(1212);
        const int n = 40;
        CellMatrix thresholds(n);
        std::vector<double> sot(n), sbsod(n);
        std::vector<int> vr(n);
        for (int i = 0; i < n; ++i) {
            const double z = rng.normal();
            thresholds[i] = {0.75 + 0.3 * rng.normal(), 0.98 + 0.3 * rng.normal(),
                             1.33 + 0.3 * rng.normal(), 1.64 + 0.4 * z};
            sot[i] = 30.0 + 12.0 * (0.9 * z + 0.44 * rng.normal());
            sbsod[i] = std::clamp(4.2 + rng.normal(), 1.0, 7.0);
            vr[i] = 1 + rng.uniform_int(5);
        }
        const ExperimentDataset ds = make_dataset(thresholds, sot, sbsod, vr);
        const CorrelationTable table = compute_correlation_table(ds);
        REQUIRE(table.sufficient_n);
        CHECK(table.cells[0][3].starred);  // sot x backward-large
        CHECK(table.cells[0][3].r > 0.5);
    }
    SECTION("two-row dataset reports insufficient n for correlations") {
        const CellMatrix thresholds{{0.7, 1.0, 1.3, 1.6}, {0.8, 0.9, 1.2, 1.7}};
        const AnalysisReport report = analyze_dataset(make_dataset(thresholds));
        CHECK(report.anova_valid);
        CHECK(!report.correlations.sufficient_n);
    }
    SECTION("constant thresholds flag a degenerate ANOVA") {
        CellMatrix thresholds(5);
        for (auto& row : thresholds) row = {1.0, 1.0, 1.0, 1.0};
        const AnalysisReport report = analyze_dataset(make_dataset(thresholds));
        CHECK(report.art.direction.degenerate);
        CHECK(report.raw.direction.degenerate);
    }
    SECTION("empty dataset is rejected") {
        CHECK_THROWS_AS(analyze_dataset(ExperimentDataset{}), ValidationError);
    }
}
