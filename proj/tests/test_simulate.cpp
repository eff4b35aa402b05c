#include <doctest.h>

#include <nlohmann/json.hpp>

#include "srnn/pipeline.hpp"
#include "srnn/simulate.hpp"

using namespace srnn;
using nlohmann::json;

TEST_CASE("single-object scenes have no collision events") {
    const EngineConfig cfg;
    const SimScene scene = generate(42, 1, cfg);
    CHECK(scene.objects.size() == 1);
    CHECK(scene.events.empty());
}

TEST_CASE("head-on collision with a resting target exchanges the velocities") {
    const EngineConfig cfg;
    // Find a generated mover-vs-rest scene (the resting target makes the
    // contact normal collinear with the approach, the 1-D exchange case).
    for (std::uint64_t seed = 1; seed <= 64; ++seed) {
        const SimScene scene = generate(seed, 2, cfg);
        if (scene.objects[1].v0.norm() != 0.0) continue;
        REQUIRE(scene.events.size() == 1);
        const SimEvent& ev = scene.events[0];
        const Point3 va_pre = scene.objects[0].v0;
        CHECK(ev.va_post.norm() == doctest::Approx(0.0).epsilon(1e-9));
        CHECK(ev.vb_post.x == doctest::Approx(va_pre.x));
        CHECK(ev.vb_post.y == doctest::Approx(va_pre.y));
        // Contact at the sweep diameter.
        const double gap = distance(scene.position_at(0, ev.time_s), scene.position_at(1, ev.time_s));
        CHECK(gap == doctest::Approx(cfg.touch_thd / 2.0));
        return;
    }
    FAIL("no mover-vs-rest scene found in 64 seeds");
}

TEST_CASE("collision events conserve momentum and relative speed") {
    const EngineConfig cfg;
    for (std::uint64_t seed : {3ULL, 4ULL, 5ULL, 6ULL}) {
        const SimScene scene = generate(seed, 2, cfg);
        REQUIRE(scene.events.size() == 1);
        const SimEvent& ev = scene.events[0];
        const Point3 va_pre = scene.velocity_at(ev.a, ev.time_s - 1e-9);
        const Point3 vb_pre = scene.velocity_at(ev.b, ev.time_s - 1e-9);
        const Point3 p_pre = va_pre + vb_pre;
        const Point3 p_post = ev.va_post + ev.vb_post;
        CHECK(p_pre.x == doctest::Approx(p_post.x));
        CHECK(p_pre.y == doctest::Approx(p_post.y));
        CHECK((va_pre - vb_pre).norm() == doctest::Approx((ev.va_post - ev.vb_post).norm()));
    }
}

TEST_CASE("generate is deterministic in the seed") {
    const EngineConfig cfg;
    const SimScene a = generate(123, 4, cfg);
    const SimScene b = generate(123, 4, cfg);
    CHECK(scene_to_json(a) == scene_to_json(b));
    const SimScene c = generate(124, 4, cfg);
    CHECK(scene_to_json(a) != scene_to_json(c));
}

TEST_CASE("generated scenes satisfy the margin policy and collide exactly once") {
    const EngineConfig cfg;
    for (std::uint64_t seed : {1ULL, 9ULL, 77ULL, 2024ULL}) {
        const SimScene scene = generate(seed, 2 + static_cast<int>(seed % 4), cfg);
        CHECK(scene_within_margins(scene, cfg));
        REQUIRE(scene.events.size() == 1);
        CHECK(scene.frame_count() == 125);
    }
}

TEST_CASE("the fallback template scene is margin-safe too") {
    const EngineConfig cfg;
    // Exercised through the public seed path on a handful of seeds it is
    // never expected to trigger for; build it directly via generate with
    // an adversarial object count instead.
    for (int n = 2; n <= 5; ++n) {
        const SimScene scene = generate(31337, n, cfg);
        CHECK(scene_within_margins(scene, cfg));
    }
}

TEST_CASE("noiseless rendering reproduces analytic centers bit-exactly") {
    const EngineConfig cfg;
    const SimScene scene = generate(5, 3, cfg);
    const json doc = render_observations(scene, 0.0, cfg);
    const VideoDoc video = parse_video_json(doc);
    REQUIRE(video.frame_count == scene.frame_count());
    for (int f = 0; f < video.frame_count; ++f) {
        std::size_t shape_index = 0;
        for (const auto& det : video.frames[static_cast<std::size_t>(f)]) {
            if (det.kind != DetectionKind::Shape) continue;
            const Point3 expected = scene.position_at(static_cast<int>(shape_index), f / scene.fps);
            REQUIRE(det.center_3d.has_value());
            CHECK(det.center_3d->x == expected.x);
            CHECK(det.center_3d->y == expected.y);
            CHECK(det.center_3d->z == expected.z);
            ++shape_index;
        }
    }
}

TEST_CASE("full ingest of a noiseless render recovers the trajectories bit-exactly") {
    const EngineConfig cfg;
    const SimScene scene = generate(8, 3, cfg);
    const VideoDoc video = parse_video_json(render_observations(scene, 0.0, cfg));
    const auto tracks = ingest_video(video, cfg);
    REQUIRE(tracks.size() == scene.objects.size());
    for (const auto& track : tracks) {
        // Identify the simulated object by its composite label.
        int obj = -1;
        for (std::size_t i = 0; i < scene.objects.size(); ++i) {
            if (scene.objects[i].composite_label() == track.composite_label()) obj = static_cast<int>(i);
        }
        REQUIRE(obj >= 0);
        CHECK(track.samples.size() == static_cast<std::size_t>(scene.frame_count()));
        for (const auto& sample : track.samples) {
            const Point3 expected = scene.position_at(obj, sample.frame_index / scene.fps);
            CHECK(sample.center->x == expected.x);
            CHECK(sample.center->y == expected.y);
            CHECK(sample.center->z == expected.z);
        }
    }
}

TEST_CASE("rendering with noise is deterministic and sigma-bounded in practice") {
    const EngineConfig cfg;
    const SimScene scene = generate(6, 2, cfg);
    const json a = render_observations(scene, 0.004, cfg);
    const json b = render_observations(scene, 0.004, cfg);
    CHECK(a == b);
    CHECK(a != render_observations(scene, 0.0, cfg));
}

TEST_CASE("oracle: stationary object rests in every slot") {
    const EngineConfig cfg;
    SimScene scene;
    scene.seed = 0;
    scene.fps = cfg.frames_per_second;
    scene.duration_s = 5.0;
    scene.objects.push_back({"red", "metal", "sphere", {0.4, 0.2, 5}, {}, 0});
    const auto slots = oracle_relations(scene, cfg);
    REQUIRE(slots.size() == 5);
    for (const auto& slot : slots) {
        REQUIRE(slot.events.size() == 1);
        CHECK(slot.events[0].kind == RelationKind::Rest);
    }
}

TEST_CASE("oracle: head-on scene yields exactly one touch, in the contact slot") {
    const EngineConfig cfg;
    const SimScene scene = generate(17, 2, cfg);
    REQUIRE(scene.events.size() == 1);
    const int contact_slot = static_cast<int>(scene.events[0].time_s / cfg.slot_duration_s);
    int touches = 0;
    for (const auto& slot : oracle_relations(scene, cfg)) {
        for (const auto& event : slot.events) {
            if (event.kind != RelationKind::Touch) continue;
            ++touches;
            CHECK(event.slot_index == contact_slot);
        }
    }
    CHECK(touches == 1);
}

TEST_CASE("oracle: receding pair reports go_farther while attended") {
    const EngineConfig cfg;
    SimScene scene;
    scene.seed = 0;
    scene.fps = cfg.frames_per_second;
    scene.duration_s = 5.0;
    scene.objects.push_back({"red", "metal", "sphere", {0.0, 0.0, 5}, {-0.2, 0, 0}, 0});
    scene.objects.push_back({"blue", "rubber", "cube", {0.06, 0.0, 5}, {0.2, 0, 0}, 0});
    const auto slots = oracle_relations(scene, cfg);
    bool found = false;
    for (const auto& event : slots[0].events) {
        if (event.kind == RelationKind::GoFarther) found = true;
    }
    CHECK(found);
    // Later slots: separation far beyond the attention distance.
    for (const auto& event : slots[3].events) CHECK(is_kinematic(event.kind));
}

TEST_CASE("scene json round trip") {
    const EngineConfig cfg;
    const SimScene scene = generate(99, 5, cfg);
    const SimScene back = scene_from_json(scene_to_json(scene));
    CHECK(scene_to_json(back) == scene_to_json(scene));
}
