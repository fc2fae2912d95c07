#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "atp/error.hpp"
#include "atp/geometry.hpp"
#include "atp/rng.hpp"
#include "atp/stats.hpp"

namespace atp {

enum class TrialKind { Training, Catch, StaircaseForward, StaircaseBackward };

inline bool is_staircase_trial(TrialKind k) {
    return k == TrialKind::StaircaseForward || k == TrialKind::StaircaseBackward;
}

// ---------------------------------------------------------------------------
// Simulated participant
//
// Cumulative-Gaussian psychometric responder with guess and lapse rates:
//   P(detect | magnitude) = gamma + (1 - gamma - lambda) * Phi((m - pse) / sigma)
// The 50% point of this curve is what the 1-up-1-down staircase recovers.
// ---------------------------------------------------------------------------

struct ObserverModel {
    std::array<double, 4> pse{1.0, 1.0, 1.0, 1.0};  // meters, indexed by Condition
    double slope_sigma = 0.25;                      // meters
    double false_alarm_gamma = 0.0;
    double lapse_lambda = 0.0;
    int vr_experience = 3;   // ordinal 1 (novice) .. 5 (expert)
    double sbsod = 4.0;      // sense-of-direction score, 1..7
    double sot_error = 30.0; // mean absolute angular error, degrees

    void validate() const {
        if (!(slope_sigma > 0.0)) throw ConfigError("observer: slope_sigma must be positive");
        if (false_alarm_gamma < 0.0 || lapse_lambda < 0.0 ||
            false_alarm_gamma + lapse_lambda >= 1.0)
            throw ConfigError("observer: need gamma, lambda >= 0 and gamma + lambda < 1");
        for (double p : pse)
            if (!(p >= 0.0)) throw ConfigError("observer: pse must be non-negative");
        if (vr_experience < 1 || vr_experience > 5)
            throw ConfigError("observer: vr_experience must be in 1..5");
    }

    double detect_probability(Condition c, double magnitude) const {
        const double z = (magnitude - pse[static_cast<int>(c)]) / slope_sigma;
        return false_alarm_gamma + (1.0 - false_alarm_gamma - lapse_lambda) * normal_cdf(z);
    }

    /// Bernoulli response: the psychometric curve on staircase trials, the
    /// false-alarm rate on training and catch trials (where nothing moved).
    bool respond(TrialKind kind, Condition c, double effective_magnitude, RngStream& rng) const {
        const double p = is_staircase_trial(kind) ? detect_probability(c, effective_magnitude)
                                                  : false_alarm_gamma;
        return rng.bernoulli(p);
    }

    /// Uniform draw over the teleport zone disc.
    Position2 select_destination(Position2 zone_center, double zone_radius, RngStream& rng) const {
        if (!(zone_radius > 0.0)) throw ValidationError("zone_radius must be positive");
        const double r = zone_radius * std::sqrt(rng.uniform());
        const double theta = 2.0 * 3.14159265358979323846 * rng.uniform();
        return zone_center + Position2{r * std::cos(theta), r * std::sin(theta)};
    }
};

// ---------------------------------------------------------------------------
// Observer population
//
// Per-participant condition thresholds are drawn around the four condition
// means with a participant-shared component plus condition-specific spread;
// traits are tied to their target conditions through a Gaussian copula so the
// two observed trait correlations land at their configured values.
// ---------------------------------------------------------------------------

struct PopulationConfig {
    // Condition means, indexed by Condition (meters).
    std::array<double, 4> pse_mean{0.75, 0.98, 1.33, 1.64};
    double pse_sd = 0.4;         // marginal between-subject spread (meters)
    double pse_shared_sd = 0.25; // participant-level component of that spread
    double slope_sigma = 0.25;
    double false_alarm_gamma = 0.03;
    double lapse_lambda = 0.02;

    double sot_mean = 30.0, sot_sd = 12.0;   // degrees
    double sbsod_mean = 4.2, sbsod_sd = 1.0; // 1..7 scale
    double vr_mean = 2.8, vr_sd = 1.2;       // latent, rounded to 1..5

    // Target product-moment correlations between traits and their condition
    // thresholds; all other trait/condition pairs are independent.
    double sot_backward_large_r = 0.49;
    double vr_backward_small_r = -0.49;
};

namespace detail {

/// corr(f(mean + sd * L), L) for standard normal L, by Simpson quadrature.
/// Used to pre-compensate the attenuation that truncation or discretization
/// of a trait introduces into its copula correlation.
inline double latent_attenuation(const std::function<double(double)>& f, double mean, double sd) {
    constexpr int kIntervals = 4096;
    constexpr double kLim = 8.0;
    const double h = 2.0 * kLim / kIntervals;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (int i = 0; i <= kIntervals; ++i) {
        const double l = -kLim + i * h;
        const double weight = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double phi = std::exp(-0.5 * l * l) / std::sqrt(2.0 * 3.14159265358979323846);
        const double g = f(mean + sd * l);
        m0 += weight * phi * g;
        m1 += weight * phi * g * l;
        m2 += weight * phi * g * g;
    }
    m0 *= h / 3.0;
    m1 *= h / 3.0;
    m2 *= h / 3.0;
    const double var = m2 - m0 * m0;
    if (!(var > 0.0)) throw ConfigError("population: degenerate trait transform");
    return m1 / std::sqrt(var);
}

}  // namespace detail

class Population {
public:
    explicit Population(PopulationConfig cfg = {}) : cfg_(cfg) {
        if (!(cfg_.pse_sd > 0.0)) throw ConfigError("population: pse_sd must be positive");
        if (cfg_.pse_shared_sd < 0.0 || cfg_.pse_shared_sd >= cfg_.pse_sd)
            throw ConfigError("population: need 0 <= pse_shared_sd < pse_sd");
        specific_sd_ = std::sqrt(cfg_.pse_sd * cfg_.pse_sd -
                                 cfg_.pse_shared_sd * cfg_.pse_shared_sd);

        const double sot_atten = detail::latent_attenuation(
            [](double v) { return std::max(v, 0.0); }, cfg_.sot_mean, cfg_.sot_sd);
        const double vr_atten = detail::latent_attenuation(
            [](double v) { return std::clamp(std::round(v), 1.0, 5.0); }, cfg_.vr_mean,
            cfg_.vr_sd);

        sot_loading_ = cfg_.sot_backward_large_r * cfg_.pse_sd / (specific_sd_ * sot_atten);
        vr_loading_ = cfg_.vr_backward_small_r * cfg_.pse_sd / (specific_sd_ * vr_atten);
        if (std::fabs(sot_loading_) > 1.0 || std::fabs(vr_loading_) > 1.0)
            throw ConfigError(
                "population: trait correlation unreachable with this pse_shared_sd/pse_sd ratio");
    }

    const PopulationConfig& config() const { return cfg_; }

    ObserverModel sample(RngStream& rng) const {
        const double z_shared = rng.normal();
        std::array<double, 4> z{};
        for (double& v : z) v = rng.normal();
        const double e_sot = rng.normal();
        const double e_vr = rng.normal();
        const double e_sbsod = rng.normal();

        ObserverModel m;
        for (int c = 0; c < kConditionCount; ++c)
            m.pse[c] = std::max(0.0, cfg_.pse_mean[c] + cfg_.pse_shared_sd * z_shared +
                                         specific_sd_ * z[c]);
        m.slope_sigma = cfg_.slope_sigma;
        m.false_alarm_gamma = cfg_.false_alarm_gamma;
        m.lapse_lambda = cfg_.lapse_lambda;

        const int bl = static_cast<int>(Condition::BackwardLarge);
        const int bs = static_cast<int>(Condition::BackwardSmall);
        const double l_sot =
            sot_loading_ * z[bl] + std::sqrt(1.0 - sot_loading_ * sot_loading_) * e_sot;
        const double l_vr =
            vr_loading_ * z[bs] + std::sqrt(1.0 - vr_loading_ * vr_loading_) * e_vr;

        m.sot_error = std::max(0.0, cfg_.sot_mean + cfg_.sot_sd * l_sot);
        m.vr_experience = static_cast<int>(
            std::clamp(std::round(cfg_.vr_mean + cfg_.vr_sd * l_vr), 1.0, 5.0));
        m.sbsod = std::clamp(cfg_.sbsod_mean + cfg_.sbsod_sd * e_sbsod, 1.0, 7.0);
        m.validate();
        return m;
    }

private:
    PopulationConfig cfg_;
    double specific_sd_ = 0.0;
    double sot_loading_ = 0.0;
    double vr_loading_ = 0.0;
};

/// Population matched to the reported condition thresholds (0.75 / 0.98 /
/// 1.33 / 1.64 m) and trait correlation pattern.
inline Population reference_population() { return Population(PopulationConfig{}); }

}  // namespace atp
