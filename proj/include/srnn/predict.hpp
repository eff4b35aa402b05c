#pragma once

#include <vector>

#include "srnn/config.hpp"
#include "srnn/geometry.hpp"
#include "srnn/ingest.hpp"
#include "srnn/relations.hpp"

namespace srnn {

// Constant-velocity model fitted to a trajectory tail: principal
// motion direction plus regressed speed along it, anchored at the last
// sample time.
struct MotionModel {
    int track_id = -1;
    Point3 anchor;
    Point3 direction{1.0, 0.0, 0.0}; // unit; arbitrary when speed == 0
    double speed = 0.0;              // length units per second, >= 0
    double fit_residual = 0.0;       // RMS distance of samples to the fitted line

    Point3 position_at(double t) const { return anchor + direction * (speed * t); }
};

struct TouchForecast {
    int track_a = -1;
    int track_b = -1;
    double time_of_min = 0.0; // seconds from the anchor (video end), clamped to [0, horizon]
    double min_distance = 0.0;
    bool predicted = false;
};

// PCA direction over the mean-centered positions, linear regression of
// the axis projection against time for the speed, direction flipped so
// speed >= 0. Tracks whose windowed net displacement does not exceed
// move_thd get speed 0. Throws InsufficientData below 3 samples.
MotionModel fit_motion(const std::vector<std::pair<double, Point3>>& samples, const EngineConfig& cfg);

// Closest approach of two constant-velocity models within the horizon.
// Predicted iff the anchors start within predict_att_thd and the
// minimum distance falls below touch_thd.
TouchForecast forecast_touch(const MotionModel& a, const MotionModel& b, const EngineConfig& cfg,
                             double horizon_s);

// Fits a track's samples within one slot (times taken as frame / fps).
MotionModel fit_track_motion(const ObjectTrack& track, const TimeSlot& slot, double fps,
                             const EngineConfig& cfg);

} // namespace srnn
