#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "srnn/pipeline.hpp"

using namespace srnn;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

VideoDoc simulated_video(std::uint64_t seed, int n, double noise = 0.0) {
    const EngineConfig cfg;
    const SimScene scene = generate(seed, n, cfg);
    return parse_video_json(render_observations(scene, noise, cfg));
}

std::size_t count_kind(const DescriptionDoc& doc, RelationKind kind) {
    std::size_t n = 0;
    for (const auto& segment : doc.segments) {
        for (const auto& sentence : segment.sentences) n += sentence.kind == kind;
    }
    for (const auto& sentence : doc.predictions) n += sentence.kind == kind;
    return n;
}

std::multiset<std::string> sentence_multiset(const DescriptionDoc& doc) {
    std::multiset<std::string> out;
    for (const auto& segment : doc.segments) {
        for (const auto& sentence : segment.sentences) out.insert(sentence.text);
    }
    for (const auto& sentence : doc.predictions) out.insert(sentence.text);
    return out;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("a head-on scene describes exactly one touch") {
    const VideoDoc video = simulated_video(21, 2);
    const RunArtifacts artifacts = run_pipeline(video, EngineConfig{}, {});
    CHECK(count_kind(artifacts.doc, RelationKind::Touch) == 1);
    CHECK(artifacts.doc.segments.size() == 5);
    CHECK(check_graph_invariants(artifacts.graph).ok());
}

TEST_CASE("ablating touch removes exactly the touch sentences") {
    const VideoDoc video = simulated_video(22, 3);
    const RunArtifacts full = run_pipeline(video, EngineConfig{}, {});
    RunOptions ablated_options;
    ablated_options.ablate = {"touch"};
    const RunArtifacts ablated = run_pipeline(video, EngineConfig{}, ablated_options);
    CHECK(count_kind(full.doc, RelationKind::Touch) == 1);
    CHECK(count_kind(ablated.doc, RelationKind::Touch) == 0);
    CHECK(ablated.graph.find("#touch") == -1);

    auto full_rest = sentence_multiset(full.doc);
    for (const auto& segment : full.doc.segments) {
        for (const auto& sentence : segment.sentences) {
            if (sentence.kind == RelationKind::Touch) full_rest.erase(full_rest.find(sentence.text));
        }
    }
    CHECK(full_rest == sentence_multiset(ablated.doc));
}

TEST_CASE("ablating distance trends leaves touches untouched") {
    const VideoDoc video = simulated_video(23, 4);
    const RunArtifacts full = run_pipeline(video, EngineConfig{}, {});
    RunOptions options;
    options.ablate = {"distance_change"};
    const RunArtifacts ablated = run_pipeline(video, EngineConfig{}, options);
    CHECK(count_kind(ablated.doc, RelationKind::GoCloser) == 0);
    CHECK(count_kind(ablated.doc, RelationKind::GoCloserThenFarther) == 0);
    CHECK(count_kind(ablated.doc, RelationKind::Touch) == count_kind(full.doc, RelationKind::Touch));
}

TEST_CASE("rest_state ablation disregards stationary-only tracks entirely") {
    const VideoDoc video = simulated_video(24, 4); // object 3 of 4 is a resting extra
    const RunArtifacts full = run_pipeline(video, EngineConfig{}, {});
    RunOptions options;
    options.ablate = {"rest_state"};
    const RunArtifacts ablated = run_pipeline(video, EngineConfig{}, options);

    // Some track rests in every slot of the full run.
    std::map<int, std::pair<std::size_t, std::size_t>> kin; // id -> (rest, total)
    for (const auto& slot : full.slot_events) {
        for (const auto& event : slot.events) {
            if (!is_kinematic(event.kind)) continue;
            auto& [rest, total] = kin[event.participants[0]];
            rest += event.kind == RelationKind::Rest;
            ++total;
        }
    }
    int rest_only = -1;
    for (const auto& [id, counts] : kin) {
        if (counts.first == counts.second) rest_only = id;
    }
    REQUIRE(rest_only >= 0);

    const std::string name = "ins_entity_" + std::to_string(rest_only);
    CHECK(full.graph.find(name) >= 0);
    CHECK(ablated.graph.find(name) == -1); // never fired, never wired
    for (const auto& slot : ablated.slot_events) {
        for (const auto& event : slot.events) {
            for (int participant : event.participants) CHECK(participant != rest_only);
        }
    }
}

TEST_CASE("time shuffle permutes segments, preserving each slot's sentences") {
    const VideoDoc video = simulated_video(25, 3);
    const RunArtifacts plain = run_pipeline(video, EngineConfig{}, {});
    RunOptions options;
    options.shuffle_seed = 4242;
    const RunArtifacts shuffled = run_pipeline(video, EngineConfig{}, options);

    CHECK(sentence_multiset(plain.doc) == sentence_multiset(shuffled.doc));
    std::map<int, std::vector<std::string>> plain_slots, shuffled_slots;
    for (const auto& segment : plain.doc.segments) {
        for (const auto& s : segment.sentences) plain_slots[segment.slot_index].push_back(s.text);
    }
    for (const auto& segment : shuffled.doc.segments) {
        for (const auto& s : segment.sentences) shuffled_slots[segment.slot_index].push_back(s.text);
    }
    CHECK(plain_slots == shuffled_slots);

    std::vector<int> order;
    for (const auto& segment : shuffled.doc.segments) order.push_back(segment.slot_index);
    CHECK(order != std::vector<int>{0, 1, 2, 3, 4});
    CHECK(check_graph_invariants(shuffled.graph).ok());
}

TEST_CASE("forecast events appear for closing pairs and honor the ablation") {
    // Truncate the video before the contact so the pair is still
    // approaching when it ends.
    const EngineConfig cfg;
    const SimScene scene = generate(26, 2, cfg);
    VideoDoc video = parse_video_json(render_observations(scene, 0.0, cfg));
    const int cut_slots = static_cast<int>(scene.events[0].time_s / cfg.slot_duration_s);
    REQUIRE(cut_slots >= 1);
    video.frame_count = cut_slots * cfg.slot_frame_count();
    video.frames.resize(static_cast<std::size_t>(video.frame_count));
    RunOptions options;
    options.slot_count = cut_slots;

    const RunArtifacts artifacts = run_pipeline(video, cfg, options);
    REQUIRE(artifacts.future_events.size() == 1);
    CHECK(count_kind(artifacts.doc, RelationKind::FutureTouch) == 1);
    REQUIRE(artifacts.forecasts.size() == 1);
    CHECK(artifacts.forecasts[0].predicted);
    CHECK(artifacts.forecasts[0].min_distance < cfg.touch_thd);

    RunOptions ablated = options;
    ablated.ablate = {"future_touch"};
    const RunArtifacts no_future = run_pipeline(video, cfg, ablated);
    CHECK(no_future.future_events.empty());
    CHECK(count_kind(no_future.doc, RelationKind::FutureTouch) == 0);
}

TEST_CASE("noiseless runs match the oracle exactly, ordered participants included") {
    const EngineConfig cfg;
    for (std::uint64_t seed : {27ULL, 28ULL, 29ULL}) {
        const int n = 2 + static_cast<int>(seed % 4);
        const SimScene scene = generate(seed, n, cfg);
        const VideoDoc video = parse_video_json(render_observations(scene, 0.0, cfg));
        const RunArtifacts artifacts = run_pipeline(video, cfg, {});
        const auto oracle = oracle_relations(scene, cfg);

        // Track ids correspond to object indices here: first appearance
        // order matches render order.
        REQUIRE(artifacts.slot_events.size() == oracle.size());
        for (std::size_t s = 0; s < oracle.size(); ++s) {
            CHECK(artifacts.slot_events[s].events == oracle[s].events);
        }
        const EvalReport report =
            evaluate_against_oracle(artifacts.slot_events, artifacts.tracks, oracle, scene);
        CHECK(report.overall().fp == 0);
        CHECK(report.overall().fn == 0);
    }
}

TEST_CASE("eval reports zero touch recall under touch ablation, others unchanged") {
    const EngineConfig cfg;
    const SimScene scene = generate(30, 3, cfg);
    const VideoDoc video = parse_video_json(render_observations(scene, 0.0, cfg));
    RunOptions options;
    options.ablate = {"touch"};
    const RunArtifacts artifacts = run_pipeline(video, cfg, options);
    const EvalReport report =
        evaluate_against_oracle(artifacts.slot_events, artifacts.tracks, oracle_relations(scene, cfg), scene);
    CHECK(report.per_kind.at("touch").recall() == 0.0);
    CHECK(report.per_kind.at("touch").fn == 1);
    CHECK(report.per_kind.at("move").recall() == 1.0);
    CHECK(report.per_kind.at("rest").precision() == 1.0);
}

TEST_CASE("a one-object scene evaluates vacuously at perfect precision and recall") {
    const EngineConfig cfg;
    const SimScene scene = generate(55, 1, cfg);
    const VideoDoc video = parse_video_json(render_observations(scene, 0.0, cfg));
    const RunArtifacts artifacts = run_pipeline(video, cfg, {});
    const EvalReport report =
        evaluate_against_oracle(artifacts.slot_events, artifacts.tracks, oracle_relations(scene, cfg), scene);
    CHECK(report.per_kind.at("touch").tp == 0);
    CHECK(report.per_kind.at("touch").precision() == 1.0);
    CHECK(report.per_kind.at("touch").recall() == 1.0);
    CHECK(report.overall().fp == 0);
    CHECK(report.overall().fn == 0);
}

TEST_CASE("an empty video produces an empty run, not an error") {
    const json doc = {{"video_id", "empty"}, {"fps", 25}, {"width", 480}, {"height", 320},
                      {"intrinsics", {{"f", 420}, {"cx", 240}, {"cy", 160}}},
                      {"frames", json::array()}};
    const RunArtifacts artifacts = run_pipeline(parse_video_json(doc), EngineConfig{}, {});
    CHECK(artifacts.tracks.empty());
    CHECK(artifacts.doc.to_text().empty());
}

TEST_CASE("run outputs are byte-identical across reruns and fully listed") {
    const VideoDoc video = simulated_video(31, 3);
    const fs::path base = fs::temp_directory_path() / "srnn_pipeline_test";
    fs::remove_all(base);
    RunOptions options;
    options.ablate = {"go_farther"};
    options.shuffle_seed = 9;

    for (const char* name : {"a", "b"}) {
        const RunArtifacts artifacts = run_pipeline(video, EngineConfig{}, options);
        write_run_outputs(artifacts, video, options, "input.json", "", base / name);
    }
    for (const char* file : {"description.txt", "graph.json", "graph.dot", "manifest.json"}) {
        CHECK(slurp(base / "a" / file) == slurp(base / "b" / file));
    }
    const json manifest = json::parse(slurp(base / "a" / "manifest.json"));
    for (const auto& produced : manifest["outputs"]) {
        CHECK(fs::exists(base / "a" / produced.get<std::string>()));
    }
    CHECK(manifest["ablate"] == json::array({"go_farther"}));
    fs::remove_all(base);
}
