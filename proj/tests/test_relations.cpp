#include <doctest.h>

#include <cmath>

#include "srnn/relations.hpp"

using namespace srnn;

namespace {

// Track with one sample per frame at the given positions.
ObjectTrack make_track(int id, const std::vector<Point3>& positions, int first_frame = 0) {
    ObjectTrack track;
    track.track_id = id;
    track.shape_label = "sphere";
    track.texture_label = "metal";
    track.color_label = id % 2 == 0 ? "blue" : "red";
    for (std::size_t i = 0; i < positions.size(); ++i) {
        TrackSample s;
        s.frame_index = first_frame + static_cast<int>(i);
        const double u = 240.0 + 84.0 * positions[i].x;
        const double v = 160.0 + 84.0 * positions[i].y;
        s.box = {u - 2, v - 2, u + 2, v + 2};
        s.center = positions[i];
        track.samples.push_back(s);
    }
    return track;
}

std::vector<Point3> line(int frames, Point3 start, Point3 velocity, double fps = 25.0) {
    std::vector<Point3> out;
    for (int f = 0; f < frames; ++f) out.push_back(start + velocity * (f / fps));
    return out;
}

const TimeSlot kSlot{0, 0, 25};

} // namespace

TEST_CASE("segment produces five one-second slots at 25 fps") {
    const EngineConfig cfg;
    const auto slots = segment(125, cfg);
    REQUIRE(slots.size() == 5);
    for (int k = 0; k < 5; ++k) {
        CHECK(slots[static_cast<std::size_t>(k)].start_frame == 25 * k);
        CHECK(slots[static_cast<std::size_t>(k)].end_frame == 25 * (k + 1));
    }
}

TEST_CASE("segment of a single frame yields one short slot") {
    EngineConfig cfg;
    cfg.slot_count = 1;
    const auto slots = segment(1, cfg);
    REQUIRE(slots.size() == 1);
    CHECK(slots[0].start_frame == 0);
    CHECK(slots[0].end_frame == 1);
}

TEST_CASE("trailing frames join the last slot; short videos get fewer slots") {
    const EngineConfig cfg;
    const auto slots = segment(127, cfg);
    REQUIRE(slots.size() == 5);
    CHECK(slots[4].start_frame == 100);
    CHECK(slots[4].end_frame == 127);

    const auto short_slots = segment(60, cfg);
    REQUIRE(short_slots.size() == 3);
    CHECK(short_slots[2].end_frame == 60);
}

TEST_CASE("constant position classifies as rest") {
    const EngineConfig cfg;
    const auto track = make_track(0, line(25, {0.3, 0.2, 5.0}, {}));
    const auto event = kinematic_profile(track, kSlot, cfg);
    REQUIRE(event.has_value());
    CHECK(event->kind == RelationKind::Rest);
    CHECK(event->participants == std::vector<int>{0});
}

TEST_CASE("displacement of 0.005 over a slot stays rest") {
    const EngineConfig cfg;
    // 0.005 over 24 frame steps at 25 fps
    const auto track = make_track(0, line(25, {0, 0, 5}, {0.005 * 25.0 / 24.0, 0, 0}));
    const auto event = kinematic_profile(track, kSlot, cfg);
    REQUIRE(event.has_value());
    CHECK(event->kind == RelationKind::Rest);
}

TEST_CASE("windowed displacement exactly at move_thd stays rest (strict exceed)") {
    EngineConfig cfg;
    cfg.move_thd = 0.015625; // dyadic, so the windowed mean is exact
    std::vector<Point3> positions(13, Point3{0, 0, 5});
    std::vector<Point3> tail(12, Point3{cfg.move_thd, 0, 5});
    positions.insert(positions.end(), tail.begin(), tail.end());
    // Step pattern: endpoint windows average identical values, so the
    // measured displacement equals move_thd exactly.
    CHECK(windowed_displacement(positions, cfg.moving_avg_window) == cfg.move_thd);
    const auto event = kinematic_profile(make_track(0, positions), kSlot, cfg);
    REQUIRE(event.has_value());
    CHECK(event->kind == RelationKind::Rest);
}

TEST_CASE("stationary first half then motion classifies rest_first_then_move") {
    const EngineConfig cfg;
    std::vector<Point3> positions;
    for (int f = 0; f < 25; ++f) {
        const double t = f / 25.0;
        const double x = t <= 0.52 ? 0.0 : 0.1 * (t - 0.52);
        positions.push_back({x, 0, 5});
    }
    const auto event = kinematic_profile(make_track(0, positions), kSlot, cfg);
    REQUIRE(event.has_value());
    CHECK(event->kind == RelationKind::RestFirstThenMove);

    std::reverse(positions.begin(), positions.end());
    const auto reversed = kinematic_profile(make_track(0, positions), kSlot, cfg);
    REQUIRE(reversed.has_value());
    CHECK(reversed->kind == RelationKind::MoveFirstThenRest);
}

TEST_CASE("a single sample yields no kinematic event") {
    const EngineConfig cfg;
    Diagnostics diag;
    const auto track = make_track(0, {{0, 0, 5}});
    CHECK(!kinematic_profile(track, kSlot, cfg, &diag).has_value());
    CHECK(diag.insufficient_kinematic_data == 1);
}

TEST_CASE("direction labels partition the circle with the published boundaries") {
    CHECK(std::string(direction_label_for_angle(0.0)) == "front");
    CHECK(std::string(direction_label_for_angle(22.5)) == "front");
    CHECK(std::string(direction_label_for_angle(22.5001)) == "front-right");
    CHECK(std::string(direction_label_for_angle(67.5)) == "front-right");
    CHECK(std::string(direction_label_for_angle(90.0)) == "right");
    CHECK(std::string(direction_label_for_angle(112.5)) == "right");
    CHECK(std::string(direction_label_for_angle(157.5)) == "back-right");
    CHECK(std::string(direction_label_for_angle(180.0)) == "back");
    CHECK(std::string(direction_label_for_angle(-157.5)) == "back");
    CHECK(std::string(direction_label_for_angle(-157.4999)) == "back-left");
    CHECK(std::string(direction_label_for_angle(-112.5)) == "back-left");
    CHECK(std::string(direction_label_for_angle(-67.5)) == "left");
    CHECK(std::string(direction_label_for_angle(-22.5)) == "front-left");
}

TEST_CASE("signed angle is counter-clockwise positive and lands in (-180, 180]") {
    CHECK(signed_angle_deg(1, 0, 0, 1) == doctest::Approx(90.0));
    CHECK(signed_angle_deg(1, 0, 0, -1) == doctest::Approx(-90.0));
    CHECK(signed_angle_deg(1, 0, -1, 0) == doctest::Approx(180.0));
    CHECK(signed_angle_deg(1, 0, -1, 1e-18) == doctest::Approx(180.0));
    CHECK(signed_angle_deg(1, 0, -1, -1e-9) < 0.0);
}

TEST_CASE("straight motion through the anchor yields no direction change") {
    const EngineConfig cfg;
    const auto track = make_track(0, line(25, {-0.3, 0, 5}, {0.3, 0, 0}));
    CHECK(!direction_change(track, kSlot, 12, cfg).has_value());
}

TEST_CASE("turns map to the published labels") {
    const EngineConfig cfg;
    auto bent_track = [&](double angle_deg) {
        std::vector<Point3> positions;
        Point3 p{-0.2, 0, 5};
        Point3 v{0.3, 0, 0};
        const double rad = angle_deg * M_PI / 180.0;
        const Point3 v2{0.3 * std::cos(rad), 0.3 * std::sin(rad), 0};
        for (int f = 0; f < 25; ++f) {
            positions.push_back(p);
            p += (f < 12 ? v : v2) * (1.0 / 25.0);
        }
        return make_track(0, positions);
    };
    const auto right = direction_change(bent_track(90.0), kSlot, 12, cfg);
    REQUIRE(right.has_value());
    CHECK(right->kind == RelationKind::ChangeDirection);
    CHECK(right->direction_label == "right");

    const auto back = direction_change(bent_track(180.0), kSlot, 12, cfg);
    REQUIRE(back.has_value());
    CHECK(back->direction_label == "back");

    CHECK(!direction_change(bent_track(10.0), kSlot, 12, cfg).has_value());
}

TEST_CASE("degenerate pre or post windows yield no direction change") {
    const EngineConfig cfg;
    Diagnostics diag;
    // Moves only after the anchor: the pre window is degenerate.
    std::vector<Point3> positions;
    for (int f = 0; f < 25; ++f) {
        positions.push_back({f <= 12 ? 0.0 : 0.3 * (f - 12) / 25.0, 0, 5});
    }
    CHECK(!direction_change(make_track(0, positions), kSlot, 12, cfg, &diag).has_value());
    CHECK(diag.degenerate_direction_windows == 1);
}

TEST_CASE("constant separation yields no distance trend") {
    const EngineConfig cfg;
    const auto a = make_track(0, line(25, {0, 0, 5}, {0.2, 0, 0}));
    const auto b = make_track(1, line(25, {0.05, 0, 5}, {0.2, 0, 0}));
    CHECK(!distance_change(a, b, kSlot, cfg).has_value());
}

TEST_CASE("monotonic approach inside the attention range is go_closer") {
    const EngineConfig cfg;
    const auto a = make_track(0, line(25, {-0.55, 0, 5}, {0.55, 0, 0}));
    const auto b = make_track(1, line(25, {0.03, 0, 5}, {}));
    const auto event = distance_change(a, b, kSlot, cfg);
    REQUIRE(event.has_value());
    CHECK(event->kind == RelationKind::GoCloser);
    CHECK(event->participants == std::vector<int>{0, 1}); // mover first
}

TEST_CASE("pairs never closer than the attention gate are not attended") {
    const EngineConfig cfg; // dist_att_thd = 0.1
    const auto a = make_track(0, line(25, {-0.5, 0.2, 5}, {0.55, 0, 0}));
    const auto b = make_track(1, line(25, {0.03, 0.2 - 0.2, 5}, {}));
    // min distance stays at 0.2 > 0.1
    CHECK(!distance_change(a, b, kSlot, cfg).has_value());
}

TEST_CASE("approach then recede is go_closer_then_farther; reversed is go_farther_then_closer") {
    const EngineConfig cfg;
    std::vector<Point3> toward_then_away, away_then_toward;
    for (int f = 0; f < 25; ++f) {
        const double t = f / 25.0;
        const double x = t < 0.5 ? -0.35 + 0.6 * t : -0.05 - 0.6 * (t - 0.5);
        toward_then_away.push_back({x, 0.05, 5});
        const double y = t < 0.5 ? -0.03 - 0.6 * t : -0.33 + 0.6 * (t - 0.5);
        away_then_toward.push_back({y, 0.0, 5});
    }
    const auto rest = make_track(1, line(25, {0.0, 0.0, 5}, {}));
    const auto ctf = distance_change(make_track(0, toward_then_away), rest, kSlot, cfg);
    REQUIRE(ctf.has_value());
    CHECK(ctf->kind == RelationKind::GoCloserThenFarther);
    const auto ftc = distance_change(make_track(0, away_then_toward), rest, kSlot, cfg);
    REQUIRE(ftc.has_value());
    CHECK(ftc->kind == RelationKind::GoFartherThenCloser);
}

TEST_CASE("more than one smoothed sign change is an internal inconsistency") {
    const EngineConfig cfg;
    std::vector<Point3> wobble;
    for (int f = 0; f < 25; ++f) {
        const double t = f / 25.0;
        wobble.push_back({0.06 + 0.04 * std::cos(3.0 * 2.0 * M_PI * t), 0, 5});
    }
    Diagnostics diag;
    CHECK(!distance_change(make_track(0, wobble), make_track(1, line(25, {0, 0, 5}, {})), kSlot, cfg,
                           &diag)
               .has_value());
    CHECK(diag.internal_inconsistencies == 1);
}

namespace {

// Mover hits a resting target mid-slot and stops; the target departs.
std::pair<ObjectTrack, ObjectTrack> collision_tracks(const EngineConfig& cfg) {
    const double tc = 0.6, v = 0.3;
    std::vector<Point3> mover, target;
    for (int f = 0; f < 25; ++f) {
        const double t = f / 25.0;
        mover.push_back({t < tc ? -v * (tc - t) - 0.02 : -0.02, 0, 5});
        target.push_back({t < tc ? 0.0 : v * (t - tc), 0, 5});
    }
    (void)cfg;
    return {make_track(0, mover), make_track(1, target)};
}

} // namespace

TEST_CASE("a confirmed proximity event is a touch, target reported rest_first_then_move") {
    const EngineConfig cfg;
    const auto [mover, target] = collision_tracks(cfg);
    const std::vector<ObjectTrack> all{mover, target};
    const auto touch = detect_touch(mover, target, kSlot, all, cfg);
    REQUIRE(touch.has_value());
    CHECK(touch->kind == RelationKind::Touch);
    CHECK(touch->participants == std::vector<int>{0, 1}); // larger slot displacement first

    const auto symmetric = detect_touch(target, mover, kSlot, all, cfg);
    REQUIRE(symmetric.has_value());
    CHECK(symmetric->participants == touch->participants);
}

TEST_CASE("a crossing without any motion change is not a touch") {
    const EngineConfig cfg;
    Diagnostics diag;
    // Pass within 0.01 of a resting object without deflecting.
    const auto mover = make_track(0, line(25, {-0.25, 0.01, 5}, {0.5, 0, 0}));
    const auto still = make_track(1, line(25, {0.0, 0.0, 5}, {}));
    const std::vector<ObjectTrack> all{mover, still};
    CHECK(!detect_touch(mover, still, kSlot, all, cfg, &diag).has_value());
    CHECK(diag.unconfirmed_touch_candidates == 1);
}

TEST_CASE("a third object inside the touch threshold suppresses the touch") {
    const EngineConfig cfg;
    Diagnostics diag;
    auto [mover, target] = collision_tracks(cfg);
    const auto bystander = make_track(2, line(25, {0.0, 0.03, 5}, {}));
    const std::vector<ObjectTrack> all{mover, target, bystander};
    CHECK(!detect_touch(mover, target, kSlot, all, cfg, &diag).has_value());
    CHECK(diag.isolation_suppressed_touches == 1);
}

TEST_CASE("raising touch_thd never removes a distance-qualified candidate") {
    EngineConfig cfg;
    const auto [mover, target] = collision_tracks(cfg);
    const std::vector<ObjectTrack> all{mover, target};
    REQUIRE(detect_touch(mover, target, kSlot, all, cfg).has_value());
    cfg.touch_thd = 0.08;
    CHECK(detect_touch(mover, target, kSlot, all, cfg).has_value());
}

TEST_CASE("detect_all is deterministic and canonically ordered") {
    const EngineConfig cfg;
    const auto [mover, target] = collision_tracks(cfg);
    const auto bystander = make_track(2, line(25, {0.9, 0.9, 5}, {0.2, 0, 0}));
    const std::vector<ObjectTrack> tracks{mover, target, bystander};
    const auto first = detect_all(tracks, 25, cfg);
    const auto second = detect_all(tracks, 25, cfg);
    REQUIRE(first.size() == 1);
    CHECK(first[0].events == second[0].events);
    for (std::size_t i = 1; i < first[0].events.size(); ++i) {
        CHECK(!canonical_event_less(first[0].events[i], first[0].events[i - 1]));
    }
    // Composition: kinematics for all three tracks, one touch, one trend.
    std::size_t touches = 0, kinematics = 0;
    for (const auto& event : first[0].events) {
        touches += event.kind == RelationKind::Touch;
        kinematics += is_kinematic(event.kind);
    }
    CHECK(touches == 1);
    CHECK(kinematics == 3);
}

TEST_CASE("a single moving object yields exactly its kinematic profile per slot") {
    const EngineConfig cfg;
    const auto track = make_track(0, line(125, {-1.0, 0, 5}, {0.35, 0, 0}));
    const auto slots = detect_all({track}, 125, cfg);
    REQUIRE(slots.size() == 5);
    for (const auto& slot : slots) {
        REQUIRE(slot.events.size() == 1);
        CHECK(slot.events[0].kind == RelationKind::Move);
    }
}

TEST_CASE("empty input produces empty slots") {
    const EngineConfig cfg;
    const auto slots = detect_all({}, 125, cfg);
    REQUIRE(slots.size() == 5);
    for (const auto& slot : slots) CHECK(slot.events.empty());
}
