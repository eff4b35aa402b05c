#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srnn/config.hpp"
#include "srnn/errors.hpp"
#include "srnn/geometry.hpp"

namespace srnn {

enum class DetectionKind { Shape, Texture };

// One raw detector output for a single frame. Exactly one of
// center_depth / center_3d must be present on the detection that
// carries the object center (by convention the shape detection).
struct Detection {
    int frame_index = 0;
    DetectionKind kind = DetectionKind::Shape;
    std::string label;
    double confidence = 0.0;
    Box2 box;
    std::array<double, 3> mean_rgb{};
    std::optional<double> center_depth;
    std::optional<Point3> center_3d;
};

// A shape/texture detection pair merged into one object percept.
struct BoundObject {
    int frame_index = 0;
    std::string shape_label;
    std::string texture_label;
    std::string color_label;
    Box2 box; // union of the pair
    std::optional<double> center_depth;
    std::optional<Point3> center_3d;

    std::string composite_label() const { return color_label + "_" + texture_label + "_" + shape_label; }
};

struct TrackSample {
    int frame_index = 0;
    Box2 box;
    std::optional<double> center_depth;
    std::optional<Point3> center; // filled by resolve_centers
};

// One tracked entity. Labels are constant over the track; samples are
// ordered by strictly increasing frame index and may have gaps.
struct ObjectTrack {
    int track_id = 0;
    std::string shape_label;
    std::string texture_label;
    std::string color_label;
    std::vector<TrackSample> samples;

    std::string composite_label() const { return color_label + "_" + texture_label + "_" + shape_label; }
};

// Nearest palette anchor under squared RGB distance; ties break toward
// the earlier palette entry.
std::string classify_color(const std::array<double, 3>& mean_rgb, const std::vector<ColorAnchor>& palette);

// Greedy highest-IoU matching of shape vs texture detections from one
// frame. A pair binds iff IoU >= attention_iou_thd and both sides
// classify to the same color; detections below confidence_thd are
// dropped first. Unmatched detections are tallied in diag.
std::vector<BoundObject> bind_attributes(const std::vector<Detection>& shape_dets,
                                         const std::vector<Detection>& texture_dets,
                                         const EngineConfig& cfg, Diagnostics* diag = nullptr);

// Associates per-frame objects into tracks: same composite label,
// greedy by descending IoU against the track's last box, accepted iff
// IoU >= box_overlap_thd. Unmatched objects open new tracks.
std::vector<ObjectTrack> track_objects(const std::vector<std::vector<BoundObject>>& frames,
                                       const EngineConfig& cfg);

// Back-projects samples that carry a depth through the pinhole model
// (box center as the pixel); samples with a 3D center pass through.
// Throws MissingDepthError when a sample has neither.
void resolve_centers(std::vector<ObjectTrack>& tracks, const CameraIntrinsics& k);

// Parsed per-video input document.
struct VideoDoc {
    std::string video_id;
    double fps = 25.0;
    int width = 0;
    int height = 0;
    CameraIntrinsics intrinsics;
    int frame_count = 0;
    std::vector<std::vector<Detection>> frames; // indexed by frame
    std::optional<std::uint64_t> scene_seed;    // present on simulator output
};

// Throws SchemaError on any deviation from the documented schema.
VideoDoc parse_video_json(const nlohmann::json& doc);
VideoDoc load_video(const std::filesystem::path& path);

// Full ingest: per-frame binding, tracking, center resolution.
std::vector<ObjectTrack> ingest_video(const VideoDoc& doc, const EngineConfig& cfg, Diagnostics* diag = nullptr);

// Per-frame position lookup with the gap policy: gaps of at most
// max_gap frames are linearly interpolated, longer gaps are missing.
std::optional<Point3> track_position_at(const ObjectTrack& track, int frame, int max_gap = 5,
                                        Diagnostics* diag = nullptr);

// Box at an exact sample frame, if one exists.
std::optional<Box2> track_box_at(const ObjectTrack& track, int frame);

} // namespace srnn
