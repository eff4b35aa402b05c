#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srnn/config.hpp"
#include "srnn/language.hpp"
#include "srnn/network.hpp"
#include "srnn/predict.hpp"
#include "srnn/simulate.hpp"

namespace srnn {

struct RunOptions {
    std::vector<std::string> ablate;
    std::optional<std::uint64_t> shuffle_seed;
    std::optional<int> slot_count;   // overrides cfg.slot_count
    std::optional<double> fps;       // overrides the document fps
    double horizon_slots = 2.0;      // forecast horizon in slot durations
};

struct RunArtifacts {
    EngineConfig effective_config;
    std::vector<ObjectTrack> tracks;
    std::vector<SlotEvents> slot_events;       // post-ablation detector events
    std::vector<RelationEvent> future_events;  // post-ablation forecasts
    std::vector<TouchForecast> forecasts;      // every evaluated pair
    NeuronGraph graph;
    DescriptionDoc doc;
    Diagnostics diag;
};

// Full pipeline: ingest, relation detection, ablation, forecasting,
// fire-and-wire graph construction, optional time shuffle, description.
RunArtifacts run_pipeline(const VideoDoc& doc, const EngineConfig& cfg, const RunOptions& options);

// Writes description.txt, graph.json, graph.dot and manifest.json
// (manifest last) into out_dir. Returns the manifest.
nlohmann::json write_run_outputs(const RunArtifacts& artifacts, const VideoDoc& doc,
                                 const RunOptions& options, const std::string& input_path,
                                 const std::string& config_path, const std::filesystem::path& out_dir);

struct KindScore {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    double precision() const { return tp + fp == 0 ? 1.0 : static_cast<double>(tp) / (tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : static_cast<double>(tp) / (tp + fn); }
    double f1() const {
        const double p = precision(), r = recall();
        return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
    }
};

struct EvalReport {
    std::map<std::string, KindScore> per_kind;

    KindScore overall() const;
    std::string to_text() const;
    nlohmann::json to_json() const;
};

// Compares detector output against the oracle, matching events by
// (slot, kind, participant labels, direction label); binary
// participants are matched unordered.
EvalReport evaluate_against_oracle(const std::vector<SlotEvents>& engine_events,
                                   const std::vector<ObjectTrack>& tracks,
                                   const std::vector<SlotEvents>& oracle_events, const SimScene& scene);

} // namespace srnn
