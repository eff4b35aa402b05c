#include "srnn/relations.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <tuple>

namespace srnn {

namespace {

constexpr std::array<const char*, 11> kKindNames = {
    "rest",      "move",       "rest_first_then_move",   "move_first_then_rest",
    "change_direction", "go_closer", "go_farther",       "go_farther_then_closer",
    "go_closer_then_farther", "touch", "future_touch",
};

} // namespace

const char* kind_name(RelationKind kind) { return kKindNames[static_cast<int>(kind)]; }

std::optional<RelationKind> kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (name == kKindNames[i]) return static_cast<RelationKind>(i);
    }
    return std::nullopt;
}

int kind_arity(RelationKind kind) {
    switch (kind) {
        case RelationKind::Rest:
        case RelationKind::Move:
        case RelationKind::RestFirstThenMove:
        case RelationKind::MoveFirstThenRest:
        case RelationKind::ChangeDirection:
            return 1;
        default:
            return 2;
    }
}

bool is_kinematic(RelationKind kind) {
    return kind == RelationKind::Rest || kind == RelationKind::Move ||
           kind == RelationKind::RestFirstThenMove || kind == RelationKind::MoveFirstThenRest;
}

bool is_distance_trend(RelationKind kind) {
    return kind == RelationKind::GoCloser || kind == RelationKind::GoFarther ||
           kind == RelationKind::GoFartherThenCloser || kind == RelationKind::GoCloserThenFarther;
}

bool canonical_event_less(const RelationEvent& a, const RelationEvent& b) {
    return std::tie(a.slot_index, a.kind, a.participants, a.direction_label) <
           std::tie(b.slot_index, b.kind, b.participants, b.direction_label);
}

int DistanceSeries::closest_frame() const {
    const auto it = std::min_element(values.begin(), values.end());
    return frames[static_cast<std::size_t>(it - values.begin())];
}

double DistanceSeries::min_value() const { return *std::min_element(values.begin(), values.end()); }

std::vector<TimeSlot> segment(int frame_count, const EngineConfig& cfg) {
    std::vector<TimeSlot> slots;
    const int length = cfg.slot_frame_count();
    for (int k = 0; k < cfg.slot_count; ++k) {
        const int start = k * length;
        if (start >= frame_count) break;
        int end = std::min(start + length, frame_count);
        if (k == cfg.slot_count - 1) end = frame_count; // trailing frames join the last slot
        slots.push_back({k, start, end});
    }
    return slots;
}

double windowed_displacement(const std::vector<Point3>& positions, int window) {
    const int n = static_cast<int>(positions.size());
    if (n < 2) return 0.0;
    const int w = std::max(1, std::min(window, n / 2));
    Point3 head{}, tail{};
    for (int i = 0; i < w; ++i) {
        head += positions[static_cast<std::size_t>(i)];
        tail += positions[static_cast<std::size_t>(n - w + i)];
    }
    return distance(head * (1.0 / w), tail * (1.0 / w));
}

const char* direction_label_for_angle(double angle_deg) {
    if (angle_deg <= -157.5) return "back";
    if (angle_deg <= -112.5) return "back-left";
    if (angle_deg <= -67.5) return "left";
    if (angle_deg <= -22.5) return "front-left";
    if (angle_deg <= 22.5) return "front";
    if (angle_deg <= 67.5) return "front-right";
    if (angle_deg <= 112.5) return "right";
    if (angle_deg <= 157.5) return "back-right";
    return "back";
}

double signed_angle_deg(double ax, double ay, double bx, double by) {
    const double cross = ax * by - ay * bx;
    const double dot = ax * bx + ay * by;
    double deg = std::atan2(cross, dot) * 180.0 / M_PI;
    if (deg == -180.0) deg = 180.0;
    return deg;
}

std::vector<Point3> slot_positions(const ObjectTrack& track, const TimeSlot& slot) {
    std::vector<Point3> positions;
    for (const auto& s : track.samples) {
        if (s.frame_index < slot.start_frame) continue;
        if (s.frame_index >= slot.end_frame) break;
        if (s.center) positions.push_back(*s.center);
    }
    return positions;
}

namespace {

bool moved(double displacement, const EngineConfig& cfg) { return displacement > cfg.move_thd; }

// Mover first; ties break toward the lower track id.
std::pair<int, int> order_mover_first(const ObjectTrack& a, const ObjectTrack& b, const TimeSlot& slot,
                                      const EngineConfig& cfg) {
    const double da = windowed_displacement(slot_positions(a, slot), cfg.moving_avg_window);
    const double db = windowed_displacement(slot_positions(b, slot), cfg.moving_avg_window);
    const bool a_first = da > db || (da == db && a.track_id <= b.track_id);
    return a_first ? std::pair<int, int>{a.track_id, b.track_id}
                   : std::pair<int, int>{b.track_id, a.track_id};
}

} // namespace

std::optional<RelationEvent> kinematic_profile(const ObjectTrack& track, const TimeSlot& slot,
                                               const EngineConfig& cfg, Diagnostics* diag) {
    const std::vector<Point3> positions = slot_positions(track, slot);
    const int n = static_cast<int>(positions.size());
    if (n < 2) {
        if (diag) ++diag->insufficient_kinematic_data;
        return std::nullopt;
    }
    RelationEvent event;
    event.slot_index = slot.slot_index;
    event.participants = {track.track_id};

    if (!moved(windowed_displacement(positions, cfg.moving_avg_window), cfg)) {
        event.kind = RelationKind::Rest;
        return event;
    }
    event.kind = RelationKind::Move;
    if (n >= 3) {
        // Halves share the middle sample so each spans a contiguous leg.
        const int mid = n / 2;
        std::vector<Point3> first(positions.begin(), positions.begin() + mid + 1);
        std::vector<Point3> second(positions.begin() + mid, positions.end());
        const bool m1 = moved(windowed_displacement(first, cfg.moving_avg_window), cfg);
        const bool m2 = moved(windowed_displacement(second, cfg.moving_avg_window), cfg);
        if (!m1 && m2) event.kind = RelationKind::RestFirstThenMove;
        if (m1 && !m2) event.kind = RelationKind::MoveFirstThenRest;
    }
    return event;
}

std::optional<RelationEvent> direction_change(const ObjectTrack& track, const TimeSlot& slot,
                                              int touch_frame, const EngineConfig& cfg,
                                              Diagnostics* diag) {
    std::vector<Point3> before, after;
    for (const auto& s : track.samples) {
        if (s.frame_index < slot.start_frame || s.frame_index >= slot.end_frame || !s.center) continue;
        if (s.frame_index <= touch_frame) before.push_back(*s.center);
        if (s.frame_index >= touch_frame) after.push_back(*s.center);
    }
    if (before.size() < 2 || after.size() < 2) {
        if (diag) ++diag->degenerate_direction_windows;
        return std::nullopt;
    }
    const Point3 pre = before.back() - before.front();
    const Point3 post = after.back() - after.front();
    if (!(pre.norm() > cfg.move_thd) || !(post.norm() > cfg.move_thd)) {
        if (diag) ++diag->degenerate_direction_windows;
        return std::nullopt;
    }
    const double angle = signed_angle_deg(pre.x, pre.y, post.x, post.y);
    if (std::abs(angle) <= cfg.direction_change_angle_thd) return std::nullopt;

    RelationEvent event;
    event.slot_index = slot.slot_index;
    event.kind = RelationKind::ChangeDirection;
    event.participants = {track.track_id};
    event.direction_label = direction_label_for_angle(angle);
    return event;
}

std::optional<DistanceSeries> build_distance_series(const ObjectTrack& a, const ObjectTrack& b,
                                                    const TimeSlot& slot, Diagnostics* diag) {
    DistanceSeries series;
    series.track_a = a.track_id;
    series.track_b = b.track_id;
    for (int f = slot.start_frame; f < slot.end_frame; ++f) {
        const auto pa = track_position_at(a, f, 5, diag);
        if (!pa) continue;
        const auto pb = track_position_at(b, f, 5, diag);
        if (!pb) continue;
        series.frames.push_back(f);
        series.values.push_back(distance(*pa, *pb));
    }
    if (series.values.empty()) return std::nullopt;
    return series;
}

std::optional<RelationEvent> distance_change(const ObjectTrack& a, const ObjectTrack& b,
                                             const TimeSlot& slot, const EngineConfig& cfg,
                                             Diagnostics* diag) {
    const auto series = build_distance_series(a, b, slot, diag);
    if (!series) return std::nullopt;
    const int n = static_cast<int>(series->values.size());
    const int w = cfg.moving_avg_window;
    if (n < w) return std::nullopt;

    std::vector<double> smoothed;
    smoothed.reserve(static_cast<std::size_t>(n - w + 1));
    double acc = std::accumulate(series->values.begin(), series->values.begin() + w, 0.0);
    smoothed.push_back(acc / w);
    for (int i = w; i < n; ++i) {
        acc += series->values[static_cast<std::size_t>(i)] - series->values[static_cast<std::size_t>(i - w)];
        smoothed.push_back(acc / w);
    }

    const auto [min_it, max_it] = std::minmax_element(smoothed.begin(), smoothed.end());
    if (*min_it > cfg.dist_att_thd) return std::nullopt; // not attended
    if (!(*max_it - *min_it > cfg.distance_amplitude_thd)) return std::nullopt;

    int sign_changes = 0;
    int first_sign = 0, last_sign = 0;
    for (std::size_t i = 1; i < smoothed.size(); ++i) {
        const double d = smoothed[i] - smoothed[i - 1];
        if (d == 0.0) continue;
        const int sign = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++sign_changes;
        if (first_sign == 0) first_sign = sign;
        last_sign = sign;
    }
    if (sign_changes > 1) {
        if (diag) ++diag->internal_inconsistencies;
        return std::nullopt;
    }

    RelationEvent event;
    event.slot_index = slot.slot_index;
    const auto [first, second] = order_mover_first(a, b, slot, cfg);
    event.participants = {first, second};
    if (sign_changes == 0) {
        event.kind = first_sign < 0 ? RelationKind::GoCloser : RelationKind::GoFarther;
    } else {
        event.kind = first_sign < 0 ? RelationKind::GoCloserThenFarther : RelationKind::GoFartherThenCloser;
    }
    return event;
}

namespace {

struct TouchHit {
    RelationEvent event;
    int touch_frame = 0;
};

std::optional<TouchHit> detect_touch_impl(const ObjectTrack& a, const ObjectTrack& b, const TimeSlot& slot,
                                          const std::vector<ObjectTrack>& all_tracks,
                                          const EngineConfig& cfg, Diagnostics* diag) {
    const auto series = build_distance_series(a, b, slot, nullptr);
    if (!series) return std::nullopt;
    const int closest = series->closest_frame();

    bool candidate = series->min_value() < cfg.touch_thd;
    if (!candidate) {
        const auto box_a = track_box_at(a, closest);
        const auto box_b = track_box_at(b, closest);
        candidate = box_a && box_b && iou(*box_a, *box_b) >= cfg.touch_box_overlap_thd;
    }
    if (!candidate) return std::nullopt;

    // Auxiliary motion: one participant must turn or start moving.
    auto rest_to_move = [&](const ObjectTrack& t) {
        const auto profile = kinematic_profile(t, slot, cfg, nullptr);
        return profile && profile->kind == RelationKind::RestFirstThenMove;
    };
    const bool confirmed = direction_change(a, slot, closest, cfg, nullptr).has_value() ||
                           direction_change(b, slot, closest, cfg, nullptr).has_value() ||
                           rest_to_move(a) || rest_to_move(b);
    if (!confirmed) {
        if (diag) ++diag->unconfirmed_touch_candidates;
        return std::nullopt;
    }

    // Isolation: no third track near either participant during the slot.
    for (const auto& third : all_tracks) {
        if (third.track_id == a.track_id || third.track_id == b.track_id) continue;
        for (const ObjectTrack* participant : {&a, &b}) {
            const auto other = build_distance_series(third, *participant, slot, nullptr);
            if (other && other->min_value() < cfg.touch_thd) {
                if (diag) ++diag->isolation_suppressed_touches;
                return std::nullopt;
            }
        }
    }

    TouchHit hit;
    hit.touch_frame = closest;
    hit.event.slot_index = slot.slot_index;
    hit.event.kind = RelationKind::Touch;
    const auto [first, second] = order_mover_first(a, b, slot, cfg);
    hit.event.participants = {first, second};
    return hit;
}

} // namespace

std::optional<RelationEvent> detect_touch(const ObjectTrack& a, const ObjectTrack& b, const TimeSlot& slot,
                                          const std::vector<ObjectTrack>& all_tracks,
                                          const EngineConfig& cfg, Diagnostics* diag) {
    const auto hit = detect_touch_impl(a, b, slot, all_tracks, cfg, diag);
    if (!hit) return std::nullopt;
    return hit->event;
}

std::vector<SlotEvents> detect_all(const std::vector<ObjectTrack>& tracks, int frame_count,
                                   const EngineConfig& cfg, Diagnostics* diag) {
    std::vector<SlotEvents> result;
    for (const TimeSlot& slot : segment(frame_count, cfg)) {
        SlotEvents out;
        out.slot = slot;

        for (const auto& track : tracks) {
            if (auto event = kinematic_profile(track, slot, cfg, diag)) out.events.push_back(*event);
        }

        std::vector<TouchHit> hits;
        for (std::size_t i = 0; i < tracks.size(); ++i) {
            for (std::size_t j = i + 1; j < tracks.size(); ++j) {
                if (auto hit = detect_touch_impl(tracks[i], tracks[j], slot, tracks, cfg, diag)) {
                    hits.push_back(*hit);
                    out.events.push_back(hit->event);
                }
            }
        }
        for (const auto& hit : hits) {
            for (int participant : hit.event.participants) {
                const auto& track = *std::find_if(tracks.begin(), tracks.end(), [&](const ObjectTrack& t) {
                    return t.track_id == participant;
                });
                if (auto event = direction_change(track, slot, hit.touch_frame, cfg, diag)) {
                    out.events.push_back(*event);
                }
            }
        }

        for (std::size_t i = 0; i < tracks.size(); ++i) {
            for (std::size_t j = i + 1; j < tracks.size(); ++j) {
                if (auto event = distance_change(tracks[i], tracks[j], slot, cfg, diag)) {
                    out.events.push_back(*event);
                }
            }
        }

        std::sort(out.events.begin(), out.events.end(), canonical_event_less);
        out.events.erase(std::unique(out.events.begin(), out.events.end()), out.events.end());
        result.push_back(std::move(out));
    }
    return result;
}

} // namespace srnn
