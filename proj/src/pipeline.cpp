#include "srnn/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace srnn {

using nlohmann::json;

namespace {

// Tracks whose every kinematic classification is rest; the rest-state
// ablation disregards them entirely.
std::set<int> rest_only_tracks(const std::vector<SlotEvents>& slot_events) {
    std::set<int> has_kinematic, has_motion;
    for (const auto& slot : slot_events) {
        for (const auto& event : slot.events) {
            if (!is_kinematic(event.kind)) continue;
            has_kinematic.insert(event.participants[0]);
            if (event.kind != RelationKind::Rest) has_motion.insert(event.participants[0]);
        }
    }
    std::set<int> rest_only;
    for (int id : has_kinematic) {
        if (has_motion.count(id) == 0) rest_only.insert(id);
    }
    return rest_only;
}

bool event_ablated(const RelationEvent& event, const AblationSet& ablation,
                   const std::set<int>& rest_only) {
    if (ablation.contains(event.kind)) return true;
    for (int participant : event.participants) {
        if (rest_only.count(participant) != 0) return true;
    }
    return false;
}

} // namespace

RunArtifacts run_pipeline(const VideoDoc& doc, const EngineConfig& cfg, const RunOptions& options) {
    RunArtifacts artifacts;
    EngineConfig eff = cfg;
    eff.frames_per_second = options.fps.value_or(doc.fps);
    if (options.slot_count) eff.slot_count = *options.slot_count;
    eff.validate();
    artifacts.effective_config = eff;

    const AblationSet ablation = AblationSet::parse(options.ablate);

    artifacts.tracks = ingest_video(doc, eff, &artifacts.diag);
    std::vector<SlotEvents> detected = detect_all(artifacts.tracks, doc.frame_count, eff, &artifacts.diag);

    const std::set<int> rest_only = ablation.rest_state ? rest_only_tracks(detected) : std::set<int>{};
    for (auto& slot : detected) {
        std::erase_if(slot.events,
                      [&](const RelationEvent& e) { return event_ablated(e, ablation, rest_only); });
    }
    artifacts.slot_events = std::move(detected);

    // Future-touch forecasts from the final slot's trajectories.
    if (!artifacts.slot_events.empty() && !ablation.contains(RelationKind::FutureTouch)) {
        const TimeSlot& last = artifacts.slot_events.back().slot;
        const double horizon = options.horizon_slots * eff.slot_duration_s;
        std::vector<MotionModel> models;
        for (const auto& track : artifacts.tracks) {
            if (rest_only.count(track.track_id) != 0) continue;
            try {
                models.push_back(fit_track_motion(track, last, eff.frames_per_second, eff));
            } catch (const InsufficientData&) {
                ++artifacts.diag.insufficient_kinematic_data;
            }
        }
        for (std::size_t i = 0; i < models.size(); ++i) {
            for (std::size_t j = i + 1; j < models.size(); ++j) {
                const TouchForecast forecast = forecast_touch(models[i], models[j], eff, horizon);
                artifacts.forecasts.push_back(forecast);
                if (!forecast.predicted) continue;
                RelationEvent event;
                event.slot_index = last.slot_index;
                event.kind = RelationKind::FutureTouch;
                const MotionModel& a = models[i];
                const MotionModel& b = models[j];
                const bool a_first = a.speed > b.speed || (a.speed == b.speed && a.track_id <= b.track_id);
                event.participants = a_first ? std::vector<int>{a.track_id, b.track_id}
                                             : std::vector<int>{b.track_id, a.track_id};
                artifacts.future_events.push_back(event);
            }
        }
        std::sort(artifacts.future_events.begin(), artifacts.future_events.end(), canonical_event_less);
    }

    // Fire and wire.
    artifacts.graph = load_nature_design(eff);
    remove_ablated_nature(artifacts.graph, ablation);
    std::map<int, const ObjectTrack*> by_id;
    for (const auto& track : artifacts.tracks) by_id[track.track_id] = &track;

    for (std::size_t s = 0; s < artifacts.slot_events.size(); ++s) {
        const auto& slot = artifacts.slot_events[s];
        artifacts.graph.begin_slot(slot.slot.slot_index);
        std::vector<int> stamps;
        auto fire = [&](const RelationEvent& event) {
            const int stamp = fire_wire_how(artifacts.graph, event, &artifacts.diag);
            for (int participant : event.participants) {
                fire_wire_what(artifacts.graph, *by_id.at(participant), &artifacts.diag);
            }
            build_semantic_net(artifacts.graph, stamp, &artifacts.diag);
            stamps.push_back(stamp);
        };
        for (const auto& event : slot.events) fire(event);
        if (s + 1 == artifacts.slot_events.size()) {
            for (const auto& event : artifacts.future_events) fire(event);
        }
        bind_time(artifacts.graph, slot.slot.slot_index, stamps);
        artifacts.graph.close_slot();
    }

    // Language generation requested: wake the gate neuron.
    const int wernicke = artifacts.graph.find("#wernicke");
    if (wernicke >= 0) {
        artifacts.graph.stimulate(wernicke, 1.0);
        artifacts.graph.step_activation(&artifacts.diag);
    }

    if (options.shuffle_seed) shuffle_time(artifacts.graph, *options.shuffle_seed);
    artifacts.doc = describe(artifacts.graph);
    return artifacts;
}

namespace {

json diagnostics_to_json(const Diagnostics& d) {
    return {{"unbound_detections", d.unbound_detections},
            {"low_confidence_detections", d.low_confidence_detections},
            {"interpolated_gap_frames", d.interpolated_gap_frames},
            {"long_gap_frames", d.long_gap_frames},
            {"insufficient_kinematic_data", d.insufficient_kinematic_data},
            {"degenerate_direction_windows", d.degenerate_direction_windows},
            {"internal_inconsistencies", d.internal_inconsistencies},
            {"unconfirmed_touch_candidates", d.unconfirmed_touch_candidates},
            {"isolation_suppressed_touches", d.isolation_suppressed_touches},
            {"cycle_guard_trips", d.cycle_guard_trips}};
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

} // namespace

json write_run_outputs(const RunArtifacts& artifacts, const VideoDoc& doc, const RunOptions& options,
                       const std::string& input_path, const std::string& config_path,
                       const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "description.txt", artifacts.doc.to_text());
    write_text_file(out_dir / "graph.json", graph_to_json(artifacts.graph).dump(2) + "\n");
    write_text_file(out_dir / "graph.dot", graph_to_dot(artifacts.graph));

    std::map<std::string, std::uint64_t> event_counts;
    for (const auto& slot : artifacts.slot_events) {
        for (const auto& event : slot.events) ++event_counts[kind_name(event.kind)];
    }
    for (const auto& event : artifacts.future_events) ++event_counts[kind_name(event.kind)];

    json manifest = {
        {"command", "describe"},
        {"input", input_path},
        {"video_id", doc.video_id},
        {"config", config_path.empty() ? json() : json(config_path)},
        {"ablate", options.ablate},
        {"shuffle_seed", options.shuffle_seed ? json(*options.shuffle_seed) : json()},
        {"slot_count", artifacts.effective_config.slot_count},
        {"fps", artifacts.effective_config.frames_per_second},
        {"horizon_slots", options.horizon_slots},
        {"outputs", {"description.txt", "graph.json", "graph.dot", "manifest.json"}},
        {"event_counts", event_counts},
        {"diagnostics", diagnostics_to_json(artifacts.diag)},
    };
    write_text_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
    return manifest;
}

KindScore EvalReport::overall() const {
    KindScore total;
    for (const auto& [kind, score] : per_kind) {
        total.tp += score.tp;
        total.fp += score.fp;
        total.fn += score.fn;
    }
    return total;
}

std::string EvalReport::to_text() const {
    char line[160];
    std::string out = "kind                        tp    fp    fn  precision  recall\n";
    for (const auto& [kind, score] : per_kind) {
        std::snprintf(line, sizeof(line), "%-24s %5llu %5llu %5llu   %8.4f %7.4f\n", kind.c_str(),
                      static_cast<unsigned long long>(score.tp), static_cast<unsigned long long>(score.fp),
                      static_cast<unsigned long long>(score.fn), score.precision(), score.recall());
        out += line;
    }
    const KindScore total = overall();
    std::snprintf(line, sizeof(line), "%-24s %5llu %5llu %5llu   %8.4f %7.4f\n", "overall",
                  static_cast<unsigned long long>(total.tp), static_cast<unsigned long long>(total.fp),
                  static_cast<unsigned long long>(total.fn), total.precision(), total.recall());
    out += line;
    return out;
}

json EvalReport::to_json() const {
    json kinds = json::object();
    for (const auto& [kind, score] : per_kind) {
        kinds[kind] = {{"tp", score.tp},        {"fp", score.fp},          {"fn", score.fn},
                       {"precision", score.precision()}, {"recall", score.recall()}, {"f1", score.f1()}};
    }
    const KindScore total = overall();
    return {{"per_kind", kinds},
            {"overall",
             {{"tp", total.tp},
              {"fp", total.fp},
              {"fn", total.fn},
              {"precision", total.precision()},
              {"recall", total.recall()},
              {"f1", total.f1()}}}};
}

EvalReport evaluate_against_oracle(const std::vector<SlotEvents>& engine_events,
                                   const std::vector<ObjectTrack>& tracks,
                                   const std::vector<SlotEvents>& oracle_events, const SimScene& scene) {
    // Events are matched through composite labels so track numbering
    // never has to align with scene object indices.
    auto make_key = [](const RelationEvent& event, const std::vector<std::string>& labels) {
        std::vector<std::string> names;
        for (int p : event.participants) names.push_back(labels[static_cast<std::size_t>(p)]);
        if (names.size() == 2 && names[1] < names[0]) std::swap(names[0], names[1]);
        std::string key = std::to_string(event.slot_index) + "|" + kind_name(event.kind);
        for (const auto& name : names) key += "|" + name;
        if (!event.direction_label.empty()) key += "|" + event.direction_label;
        return key;
    };

    std::vector<std::string> track_labels;
    for (const auto& track : tracks) {
        track_labels.resize(std::max(track_labels.size(), static_cast<std::size_t>(track.track_id) + 1));
        track_labels[static_cast<std::size_t>(track.track_id)] = track.composite_label();
    }
    std::vector<std::string> object_labels;
    for (const auto& object : scene.objects) object_labels.push_back(object.composite_label());

    std::map<std::string, std::pair<std::uint64_t, std::uint64_t>> counts; // key -> (engine, oracle)
    std::map<std::string, std::string> key_kind;
    for (const auto& slot : engine_events) {
        for (const auto& event : slot.events) {
            const std::string key = make_key(event, track_labels);
            ++counts[key].first;
            key_kind[key] = kind_name(event.kind);
        }
    }
    for (const auto& slot : oracle_events) {
        for (const auto& event : slot.events) {
            const std::string key = make_key(event, object_labels);
            ++counts[key].second;
            key_kind[key] = kind_name(event.kind);
        }
    }

    EvalReport report;
    for (int k = 0; k <= static_cast<int>(RelationKind::FutureTouch); ++k) {
        if (static_cast<RelationKind>(k) == RelationKind::FutureTouch) continue; // not a detector output
        report.per_kind[kind_name(static_cast<RelationKind>(k))] = {};
    }
    for (const auto& [key, pair] : counts) {
        auto& score = report.per_kind[key_kind[key]];
        const std::uint64_t matched = std::min(pair.first, pair.second);
        score.tp += matched;
        score.fp += pair.first - matched;
        score.fn += pair.second - matched;
    }
    return report;
}

} // namespace srnn
