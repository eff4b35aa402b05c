#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace srnn {

struct ColorAnchor {
    std::string name;
    std::array<double, 3> rgb;
};

// The 8 reference colors used by nearest-neighbor color categorization.
// Order matters: ties break toward the earlier entry.
std::vector<ColorAnchor> default_palette();

// Central registry of every tunable parameter. Immutable after load;
// safe to share read-only across concurrent video jobs.
struct EngineConfig {
    // Static-state perception
    double attention_iou_thd = 0.85;     // shape/texture binding IoU gate
    double color_focus_area_ratio = 0.7; // central box area the RGB producer must average over
    double confidence_thd = 0.7;         // detection confidence gate
    double focal_length = 420.0;         // pixels; default camera focal length

    // Tracking & relations
    double box_overlap_thd = 0.1;  // track association IoU gate
    double move_thd = 0.01;        // net displacement gate for move vs rest
    double dist_att_thd = 0.1;     // distance trends beyond this minimum are not attended
    int moving_avg_window = 5;     // trailing window for distance smoothing
    double touch_thd = 0.04;       // center distance gate for touch
    double touch_box_overlap_thd = 0.01; // box IoU gate for touch candidates

    // Temporal segmentation
    int slot_count = 5;
    double slot_duration_s = 1.0;
    double frames_per_second = 25.0;

    // Thresholds the relation text requires but the base table omits
    double direction_change_angle_thd = 22.5; // degrees; half a direction sector
    double distance_amplitude_thd = 0.02;     // smoothed distance swing gate
    double predict_att_thd = 0.5;             // forecasts beyond this initial distance are discarded

    double neuron_activation_threshold = 1.0; // base signal threshold; joint neurons use 2x
    std::uint64_t rng_seed = 1;               // simulator and time-shuffle seed

    std::vector<ColorAnchor> palette = default_palette();

    // Frames per time slot, round(fps * slot_duration).
    int slot_frame_count() const;

    // Throws ValidationError naming the offending key.
    void validate() const;

    bool operator==(const EngineConfig& other) const;
};

// Parses the flat `key = value` format ('#' comments, unknown keys rejected).
// Omitted keys keep their defaults. Throws ParseError / ValidationError.
EngineConfig parse_config_text(const std::string& text);
EngineConfig load_config(const std::filesystem::path& path);

std::string serialize_config(const EngineConfig& cfg);
void write_config(const EngineConfig& cfg, const std::filesystem::path& path);

} // namespace srnn
