#pragma once

#include <optional>
#include <string>
#include <vector>

#include "srnn/config.hpp"
#include "srnn/errors.hpp"
#include "srnn/ingest.hpp"

namespace srnn {

// Canonical kind order; events sort by this rank within a slot.
enum class RelationKind {
    Rest,
    Move,
    RestFirstThenMove,
    MoveFirstThenRest,
    ChangeDirection,
    GoCloser,
    GoFarther,
    GoFartherThenCloser,
    GoCloserThenFarther,
    Touch,
    FutureTouch,
};

const char* kind_name(RelationKind kind);
std::optional<RelationKind> kind_from_name(const std::string& name);
int kind_arity(RelationKind kind); // participant count, 1 or 2
bool is_kinematic(RelationKind kind);
bool is_distance_trend(RelationKind kind);

// Contiguous frame window [start_frame, end_frame).
struct TimeSlot {
    int slot_index = 0;
    int start_frame = 0;
    int end_frame = 0;

    int frame_count() const { return end_frame - start_frame; }
};

// One detected relation instance. Binary relations list the mover
// first; direction_label is set only for ChangeDirection.
struct RelationEvent {
    int slot_index = 0;
    RelationKind kind = RelationKind::Rest;
    std::vector<int> participants;
    std::string direction_label;

    bool operator==(const RelationEvent& other) const = default;
};

bool canonical_event_less(const RelationEvent& a, const RelationEvent& b);

// Per-pair distances over the frames of one slot where both tracks
// have a (possibly interpolated) position.
struct DistanceSeries {
    int track_a = 0;
    int track_b = 0;
    std::vector<int> frames;
    std::vector<double> values;

    int closest_frame() const;
    double min_value() const;
};

struct SlotEvents {
    TimeSlot slot;
    std::vector<RelationEvent> events;
};

// Splits frame_count frames into up to slot_count slots of
// round(fps * slot_duration_s) frames; trailing frames beyond the
// final slot are appended to it, and the last slot may be short when
// the video is.
std::vector<TimeSlot> segment(int frame_count, const EngineConfig& cfg);

// Net displacement between averaged endpoint windows of a position
// sequence (window = min(moving_avg_window, n/2), at least 1). With
// single-sample windows this is the plain first/last distance.
double windowed_displacement(const std::vector<Point3>& positions, int window);

// Maps an angle in (-180, 180] degrees onto the nine direction
// sectors (front, front-right, right, back-right, back, back-left,
// left, front-left); the two back half-sectors share one label.
const char* direction_label_for_angle(double angle_deg);

// Signed planar angle from vector a to vector b in degrees, (-180, 180].
double signed_angle_deg(double ax, double ay, double bx, double by);

// Positions of a track's samples inside a slot, in frame order.
std::vector<Point3> slot_positions(const ObjectTrack& track, const TimeSlot& slot);

// Rest/move classification of a track within a slot, refined into the
// two transitional states by re-testing each half of the samples.
// Returns nullopt (and counts) when fewer than 2 samples fall in the slot.
std::optional<RelationEvent> kinematic_profile(const ObjectTrack& track, const TimeSlot& slot,
                                               const EngineConfig& cfg, Diagnostics* diag = nullptr);

// Compares displacement vectors before and after touch_frame within
// the slot. Emits ChangeDirection when the signed angle magnitude
// exceeds direction_change_angle_thd; degenerate windows (displacement
// not above move_thd) yield no event.
std::optional<RelationEvent> direction_change(const ObjectTrack& track, const TimeSlot& slot,
                                              int touch_frame, const EngineConfig& cfg,
                                              Diagnostics* diag = nullptr);

std::optional<DistanceSeries> build_distance_series(const ObjectTrack& a, const ObjectTrack& b,
                                                    const TimeSlot& slot, Diagnostics* diag = nullptr);

// Distance trend of a pair: smooth with a trailing moving average,
// gate on attention (min) and amplitude (max-min), then classify the
// sign pattern of adjacent differences. More than one sign change is
// recorded as an internal inconsistency and yields no event.
std::optional<RelationEvent> distance_change(const ObjectTrack& a, const ObjectTrack& b,
                                             const TimeSlot& slot, const EngineConfig& cfg,
                                             Diagnostics* diag = nullptr);

// Touch between two tracks: a proximity candidate (min distance below
// touch_thd, or box IoU at the closest frame at least
// touch_box_overlap_thd) confirmed by a direction change or a
// rest-to-move transition of a participant, under the isolation
// condition that no third track comes within touch_thd of either
// participant during the slot.
std::optional<RelationEvent> detect_touch(const ObjectTrack& a, const ObjectTrack& b, const TimeSlot& slot,
                                          const std::vector<ObjectTrack>& all_tracks,
                                          const EngineConfig& cfg, Diagnostics* diag = nullptr);

// Runs every detector over every slot: kinematic events per track,
// touch per pair, direction changes for touch participants, distance
// trends per attended pair. Events are canonically ordered.
std::vector<SlotEvents> detect_all(const std::vector<ObjectTrack>& tracks, int frame_count,
                                   const EngineConfig& cfg, Diagnostics* diag = nullptr);

} // namespace srnn
