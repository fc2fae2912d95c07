#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "atp/geometry.hpp"
#include "atp/rng.hpp"
#include "oracles.hpp"

using namespace atp;
using Catch::Approx;

TEST_CASE("adjust_destination moves along the ray") {
    SECTION("backward shortens a straight teleport") {
        const Position2 r = adjust_destination({0, 0}, {2.5, 0}, AdjustmentDirection::Backward, 1.0);
        CHECK(r.x == Approx(1.5).margin(1e-12));
        CHECK(r.y == Approx(0.0).margin(1e-12));
    }
    SECTION("forward lengthens it") {
        const Position2 r = adjust_destination({0, 0}, {0, 9}, AdjustmentDirection::Forward, 0.98);
        CHECK(r.x == Approx(0.0).margin(1e-12));
        CHECK(r.y == Approx(9.98).margin(1e-12));
    }
    SECTION("backward clamps at the origin") {
        const Position2 r = adjust_destination({0, 0}, {2.5, 0}, AdjustmentDirection::Backward, 3.0);
        CHECK(r.x == Approx(0.0).margin(1e-12));
        CHECK(r.y == Approx(0.0).margin(1e-12));
        CHECK(distance({2.5, 0}, r) == Approx(2.5).margin(1e-12));  // effective magnitude
    }
    SECTION("degenerate direction") {
        CHECK_THROWS_AS(adjust_destination({1, 1}, {1, 1}, AdjustmentDirection::Forward, 0.5),
                        GeometryError);
    }
    SECTION("negative magnitude rejected") {
        CHECK_THROWS_AS(adjust_destination({0, 0}, {1, 0}, AdjustmentDirection::Forward, -0.1),
                        ValidationError);
    }
}

TEST_CASE("clamp_magnitude respects range cap and origin clamp") {
    CHECK(clamp_magnitude({0, 0}, {2.5, 0}, AdjustmentDirection::Backward, 4.0,
                          TeleportRange::small()) == Approx(2.5));
    CHECK(clamp_magnitude({0, 0}, {9, 0}, AdjustmentDirection::Forward, 5.0,
                          TeleportRange::large()) == Approx(3.5));
    CHECK(clamp_magnitude({0, 0}, {9, 0}, AdjustmentDirection::Backward, 0.0,
                          TeleportRange::large()) == 0.0);
    // origin clamp binds before the range cap when the teleport is short
    CHECK(clamp_magnitude({0, 0}, {1.2, 0}, AdjustmentDirection::Backward, 2.0,
                          TeleportRange::small()) == Approx(1.2));
}

TEST_CASE("room layout reproduces the expected side lengths") {
    const RoomLayout small = build_layout(TeleportRange::small());
    const RoomLayout large = build_layout(TeleportRange::large());
    CHECK(std::fabs(small.side_length - 13.54) <= 0.01);
    CHECK(std::fabs(large.side_length - 22.72) <= 0.01);

    for (const auto& layout : {small, large}) {
        for (const auto& z : layout.zone_centers)
            CHECK(norm(z) == Approx(norm(layout.zone_centers[0])).margin(1e-12));
    }
    // zone centers sit at the range's center distance, on the diagonals
    for (const auto& z : small.zone_centers) {
        CHECK(norm(z) == Approx(2.5).margin(1e-12));
        CHECK(std::fabs(std::fabs(z.x) - std::fabs(z.y)) < 1e-12);
    }
    // symmetric under 90-degree rotation: rotating any center gives another center
    for (const auto& z : large.zone_centers) {
        const Position2 rotated{-z.y, z.x};
        bool found = false;
        for (const auto& other : large.zone_centers)
            found = found || distance(rotated, other) < 1e-9;
        CHECK(found);
    }
    // each zone edge keeps the wall clearance
    const double half = small.side_length / 2.0;
    for (const auto& z : small.zone_centers) {
        const double to_wall = half - std::max(std::fabs(z.x), std::fabs(z.y));
        CHECK(to_wall - TeleportRange::small().zone_radius == Approx(kWallClearance).margin(1e-12));
    }
}

TEST_CASE("zone radius is configurable") {
    const RoomLayout wide = build_layout(TeleportRange::small(1.0));
    CHECK(wide.side_length == Approx(2.0 * (2.5 / std::sqrt(2.0) + 1.0 + 4.5)).margin(1e-12));
}

TEST_CASE("proxemic correction") {
    SECTION("lands exactly on the personal-zone boundary") {
        // selected 0.2 m short of the partner along the approach line
        const Position2 origin{0, 0}, partner{3.0, 0}, selected{2.8, 0};
        const auto r = proxemic_correction(origin, selected, partner, 1.33,
                                           ProxemicZone::Personal);
        CHECK(r.attained);
        CHECK(r.magnitude == Approx(0.25).margin(1e-9));
        CHECK(distance(r.destination, partner) == Approx(0.45).margin(1e-9));
    }
    SECTION("no-op when already far enough") {
        const Position2 origin{0, 0}, partner{4.0, 2.0}, selected{2.0, 2.0};
        const auto r = proxemic_correction(origin, selected, partner, 1.33,
                                           ProxemicZone::Personal);
        CHECK(r.attained);
        CHECK(r.magnitude == 0.0);
        CHECK(r.destination.x == selected.x);
        CHECK(r.destination.y == selected.y);
    }
    SECTION("best effort when the budget cannot reach the social zone") {
        const Position2 origin{0, 0}, partner{3.1, 0}, selected{3.0, 0};
        const double budget = 0.75;
        const auto scan = oracle::min_correction_scan(origin, selected, partner, 1.2, budget);
        REQUIRE(!scan.has_value());  // no magnitude within budget reaches 1.2 m
        const auto r = proxemic_correction(origin, selected, partner, budget,
                                           ProxemicZone::Social);
        CHECK(!r.attained);
        CHECK(r.magnitude == Approx(budget).margin(1e-12));
    }
    SECTION("smallest sufficient magnitude matches a 1 mm scan") {
        RngStream rng(4021);
        for (int i = 0; i < 50; ++i) {
            const Position2 origin{0, 0};
            const Position2 selected{rng.uniform(1.0, 4.0), rng.uniform(-1.0, 1.0)};
            const Position2 partner = selected + Position2{rng.uniform(-0.3, 0.3),
                                                           rng.uniform(-0.3, 0.3)};
            const double budget = rng.uniform(0.0, 2.0);
            const auto r = proxemic_correction(origin, selected, partner, budget,
                                               ProxemicZone::Personal);
            const auto scan = oracle::min_correction_scan(origin, selected, partner, 0.45, budget);
            if (scan.has_value()) {
                CHECK(r.attained);
                CHECK(r.magnitude <= *scan + 1e-9);  // scan overshoots by up to one step
                CHECK(r.magnitude >= *scan - 0.0011);
            } else {
                CHECK(!r.attained);
            }
        }
    }
    SECTION("zero budget leaves the destination unchanged but flags it") {
        const auto r = proxemic_correction({0, 0}, {2.0, 0}, {2.1, 0}, 0.0,
                                           ProxemicZone::Personal);
        CHECK(!r.attained);
        CHECK(r.magnitude == 0.0);
        CHECK(r.destination.x == Approx(2.0));
    }
    SECTION("equivariant under rigid transforms") {
        RngStream rng(606);
        for (int i = 0; i < 200; ++i) {
            const Position2 origin{rng.uniform(-2, 2), rng.uniform(-2, 2)};
            const Position2 selected = origin + Position2{rng.uniform(0.5, 3), rng.uniform(-1, 1)};
            const Position2 partner = selected + Position2{rng.uniform(-0.5, 0.5),
                                                           rng.uniform(-0.5, 0.5)};
            const double budget = rng.uniform(0.0, 1.5);
            const double angle = rng.uniform(0.0, 6.28318);
            const Position2 shift{rng.uniform(-3, 3), rng.uniform(-3, 3)};
            auto transform = [&](Position2 p) {
                return Position2{p.x * std::cos(angle) - p.y * std::sin(angle) + shift.x,
                                 p.x * std::sin(angle) + p.y * std::cos(angle) + shift.y};
            };
            const auto plain = proxemic_correction(origin, selected, partner, budget,
                                                   ProxemicZone::Personal);
            const auto moved = proxemic_correction(transform(origin), transform(selected),
                                                   transform(partner), budget,
                                                   ProxemicZone::Personal);
            CHECK(moved.attained == plain.attained);
            CHECK(moved.magnitude == Approx(plain.magnitude).margin(1e-9));
            CHECK(distance(moved.destination, transform(plain.destination)) <= 1e-9);
        }
    }
}

TEST_CASE("geometry invariants hold on randomized inputs") {
    RngStream rng(991);
    for (int i = 0; i < 1000; ++i) {
        const Position2 origin{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        Position2 selected{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        if (distance(origin, selected) < 1e-6) selected.x += 1.0;
        const auto dir = rng.bernoulli(0.5) ? AdjustmentDirection::Forward
                                            : AdjustmentDirection::Backward;
        const auto range = rng.bernoulli(0.5) ? TeleportRange::small() : TeleportRange::large();
        const double requested = rng.uniform(0.0, 5.0);
        const double m = clamp_magnitude(origin, selected, dir, requested, range);
        const Position2 adjusted = adjust_destination(origin, selected, dir, m);

        // collinearity
        CHECK(std::fabs(cross(adjusted - origin, selected - origin)) <= 1e-9);
        // magnitude exactness
        CHECK(std::fabs(distance(adjusted, selected) - m) <= 1e-9);
        // direction monotonicity
        const double before = distance(origin, selected);
        const double after = distance(origin, adjusted);
        if (dir == AdjustmentDirection::Forward)
            CHECK(after == Approx(before + m).margin(1e-9));
        else
            CHECK(after == Approx(before - m).margin(1e-9));

        // equivariance under a rigid transform
        const double angle = rng.uniform(0.0, 6.28318);
        const Position2 shift{rng.uniform(-3, 3), rng.uniform(-3, 3)};
        auto transform = [&](Position2 p) {
            return Position2{p.x * std::cos(angle) - p.y * std::sin(angle) + shift.x,
                             p.x * std::sin(angle) + p.y * std::cos(angle) + shift.y};
        };
        const Position2 adjusted_t =
            adjust_destination(transform(origin), transform(selected), dir, m);
        CHECK(distance(adjusted_t, transform(adjusted)) <= 1e-9);
    }
}
