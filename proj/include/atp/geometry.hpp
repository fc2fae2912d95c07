#pragma once

#include <array>
#include <cmath>
#include <string>

#include "atp/error.hpp"

namespace atp {

// ---------------------------------------------------------------------------
// Planar positions (meters, room center at the origin)
// ---------------------------------------------------------------------------

struct Position2 {
    double x = 0.0;
    double y = 0.0;
};

inline Position2 operator+(Position2 a, Position2 b) { return {a.x + b.x, a.y + b.y}; }
inline Position2 operator-(Position2 a, Position2 b) { return {a.x - b.x, a.y - b.y}; }
inline Position2 operator*(double s, Position2 v) { return {s * v.x, s * v.y}; }

inline double dot(Position2 a, Position2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Position2 a, Position2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Position2 v) { return std::hypot(v.x, v.y); }
inline double distance(Position2 a, Position2 b) { return norm(b - a); }

// ---------------------------------------------------------------------------
// Adjustment conditions
// ---------------------------------------------------------------------------

enum class AdjustmentDirection { Forward, Backward };
enum class RangeClass { Small, Large };

/// The four direction x range cells, in the order used for tables and logs.
enum class Condition : int {
    ForwardSmall = 0,
    ForwardLarge = 1,
    BackwardSmall = 2,
    BackwardLarge = 3,
};

inline constexpr int kConditionCount = 4;

inline Condition condition_of(AdjustmentDirection dir, RangeClass range) {
    const int d = dir == AdjustmentDirection::Backward ? 2 : 0;
    const int r = range == RangeClass::Large ? 1 : 0;
    return static_cast<Condition>(d + r);
}

inline AdjustmentDirection direction_of(Condition c) {
    return static_cast<int>(c) >= 2 ? AdjustmentDirection::Backward : AdjustmentDirection::Forward;
}

inline RangeClass range_class_of(Condition c) {
    return static_cast<int>(c) % 2 == 1 ? RangeClass::Large : RangeClass::Small;
}

inline std::string condition_name(Condition c) {
    switch (c) {
        case Condition::ForwardSmall: return "forward_small";
        case Condition::ForwardLarge: return "forward_large";
        case Condition::BackwardSmall: return "backward_small";
        case Condition::BackwardLarge: return "backward_large";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Teleport ranges and the room built around them
// ---------------------------------------------------------------------------

/// A teleport range: targets appear in zones centered `center_distance` from
/// the start position, and adjustments are capped at `max_adjustment`.
struct TeleportRange {
    RangeClass kind = RangeClass::Small;
    double center_distance = 2.5;  // meters
    double zone_radius = 0.5;      // meters
    double max_adjustment = 2.5;   // meters

    static TeleportRange small(double zone_radius = 0.5) {
        return {RangeClass::Small, 2.5, zone_radius, 2.5};
    }
    static TeleportRange large(double zone_radius = 0.5) {
        return {RangeClass::Large, 9.0, zone_radius, 3.5};
    }

    void validate() const {
        if (!(center_distance > zone_radius))
            throw ConfigError("teleport range: center_distance must exceed zone_radius");
        if (!(zone_radius > 0.0))
            throw ConfigError("teleport range: zone_radius must be positive");
        if (!(max_adjustment > 0.0))
            throw ConfigError("teleport range: max_adjustment must be positive");
    }
};

/// Square room with four teleport zones on the diagonals and the start
/// position at the center.
struct RoomLayout {
    double side_length = 0.0;
    std::array<Position2, 4> zone_centers{};
    double wall_clearance = 4.5;
};

inline constexpr double kWallClearance = 4.5;  // meters from zone edge to the nearest wall

/// Places the four zones on the diagonals at the range's center distance and
/// sizes the room so each zone's edge keeps `kWallClearance` to the wall.
inline RoomLayout build_layout(const TeleportRange& range) {
    range.validate();
    RoomLayout layout;
    layout.wall_clearance = kWallClearance;
    const double diag = range.center_distance / std::sqrt(2.0);
    layout.zone_centers = {Position2{diag, diag}, Position2{-diag, diag},
                           Position2{-diag, -diag}, Position2{diag, -diag}};
    layout.side_length = 2.0 * (diag + range.zone_radius + kWallClearance);
    return layout;
}

// ---------------------------------------------------------------------------
// Destination adjustment
// ---------------------------------------------------------------------------

namespace detail {
inline double ray_length_or_throw(Position2 origin, Position2 selected) {
    const double d = distance(origin, selected);
    if (d < 1e-12)
        throw GeometryError("degenerate direction: origin and selected destination coincide");
    return d;
}
}  // namespace detail

/// Moves the selected destination along the origin->selected ray.
/// Forward adjustments lengthen the teleport, backward adjustments shorten
/// it; a backward adjustment never moves the destination past the origin.
inline Position2 adjust_destination(Position2 origin, Position2 selected,
                                    AdjustmentDirection dir, double magnitude) {
    if (magnitude < 0.0) throw ValidationError("adjustment magnitude must be non-negative");
    const double d = detail::ray_length_or_throw(origin, selected);
    double m = magnitude;
    if (dir == AdjustmentDirection::Backward && m > d) m = d;
    const double scale = (d + (dir == AdjustmentDirection::Forward ? m : -m)) / d;
    return origin + scale * (selected - origin);
}

/// Caps an adjustment magnitude at the range maximum and, for backward
/// adjustments, at the teleport length (so the destination stays at or past
/// the origin).
inline double clamp_magnitude(Position2 origin, Position2 selected, AdjustmentDirection dir,
                              double magnitude, const TeleportRange& range) {
    if (magnitude < 0.0) throw ValidationError("adjustment magnitude must be non-negative");
    double m = std::min(magnitude, range.max_adjustment);
    if (dir == AdjustmentDirection::Backward)
        m = std::min(m, distance(origin, selected));
    return m;
}

// ---------------------------------------------------------------------------
// Proxemic correction policy
// ---------------------------------------------------------------------------

/// Hall's interpersonal distance zones.
enum class ProxemicZone { Intimate, Personal, Social };

/// Distance (meters) at which the given zone begins.
inline double zone_inner_boundary(ProxemicZone z) {
    switch (z) {
        case ProxemicZone::Intimate: return 0.0;
        case ProxemicZone::Personal: return 0.45;
        case ProxemicZone::Social: return 1.2;
    }
    return 0.0;
}

/// Distance (meters) at which the given zone ends.
inline double zone_outer_boundary(ProxemicZone z) {
    switch (z) {
        case ProxemicZone::Intimate: return 0.45;
        case ProxemicZone::Personal: return 1.2;
        case ProxemicZone::Social: return 3.6;
    }
    return 0.0;
}

struct ProxemicCorrection {
    Position2 destination;  // corrected teleport destination
    double magnitude = 0.0; // backward adjustment actually applied (meters)
    bool attained = true;   // destination reached the target zone boundary
};

/// Applies the smallest backward adjustment, up to `backward_threshold`, that
/// places the destination at least the target zone's inner boundary away from
/// the partner. If that is not reachable within the threshold (or without
/// moving past the origin), applies the largest allowed adjustment and flags
/// the result as not attained.
inline ProxemicCorrection proxemic_correction(Position2 origin, Position2 selected,
                                              Position2 partner, double backward_threshold,
                                              ProxemicZone target) {
    if (backward_threshold < 0.0)
        throw ValidationError("backward_threshold must be non-negative");
    const double d = detail::ray_length_or_throw(origin, selected);
    const double boundary = zone_inner_boundary(target);

    const Position2 w = selected - partner;
    if (norm(w) >= boundary) return {selected, 0.0, true};

    // Along the ray, |selected - m*u - partner| crosses the boundary at
    // m = w.u + sqrt((w.u)^2 + boundary^2 - |w|^2); the discriminant is
    // positive because |w| < boundary.
    const Position2 u = (1.0 / d) * (selected - origin);
    const double wu = dot(w, u);
    const double needed = wu + std::sqrt(wu * wu + boundary * boundary - dot(w, w));

    const double budgeted = std::min(needed, backward_threshold);
    const double applied = std::min(budgeted, d);  // backward clamp at the origin
    const Position2 destination =
        adjust_destination(origin, selected, AdjustmentDirection::Backward, applied);
    const bool attained = distance(destination, partner) >= boundary - 1e-9;
    return {destination, applied, attained};
}

}  // namespace atp
