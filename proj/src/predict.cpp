#include "srnn/predict.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "srnn/errors.hpp"

namespace srnn {

MotionModel fit_motion(const std::vector<std::pair<double, Point3>>& samples, const EngineConfig& cfg) {
    const int n = static_cast<int>(samples.size());
    if (n < 3) throw InsufficientData("fit_motion: need at least 3 samples, got " + std::to_string(n));

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    double t_mean = 0.0;
    for (const auto& [t, p] : samples) {
        centroid += Eigen::Vector3d(p.x, p.y, p.z);
        t_mean += t;
    }
    centroid /= n;
    t_mean /= n;

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& [t, p] : samples) {
        const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - centroid;
        cov += d * d.transpose();
    }

    MotionModel model;
    Eigen::Vector3d axis(1.0, 0.0, 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.info() == Eigen::Success && eig.eigenvalues()(2) > 0.0) {
        axis = eig.eigenvectors().col(2); // largest eigenvalue
    }

    // Regress the axis projection against time.
    double num = 0.0, den = 0.0;
    for (const auto& [t, p] : samples) {
        const Eigen::Vector3d d = Eigen::Vector3d(p.x, p.y, p.z) - centroid;
        num += (t - t_mean) * d.dot(axis);
        den += (t - t_mean) * (t - t_mean);
    }
    double speed = den > 0.0 ? num / den : 0.0;
    if (speed < 0.0) {
        speed = -speed;
        axis = -axis;
    }

    const double t_last = samples.back().first;
    const Eigen::Vector3d anchor = centroid + axis * (speed * (t_last - t_mean));

    double sq_sum = 0.0;
    for (const auto& [t, p] : samples) {
        const Eigen::Vector3d fitted = anchor + axis * (speed * (t - t_last));
        sq_sum += (Eigen::Vector3d(p.x, p.y, p.z) - fitted).squaredNorm();
    }
    model.fit_residual = std::sqrt(sq_sum / n);

    std::vector<Point3> positions;
    positions.reserve(samples.size());
    for (const auto& [t, p] : samples) positions.push_back(p);
    if (!(windowed_displacement(positions, cfg.moving_avg_window) > cfg.move_thd)) speed = 0.0;

    model.anchor = {anchor.x(), anchor.y(), anchor.z()};
    model.direction = {axis.x(), axis.y(), axis.z()};
    model.speed = speed;
    return model;
}

TouchForecast forecast_touch(const MotionModel& a, const MotionModel& b, const EngineConfig& cfg,
                             double horizon_s) {
    TouchForecast forecast;
    forecast.track_a = a.track_id;
    forecast.track_b = b.track_id;

    const Point3 dp0 = b.anchor - a.anchor;
    const Point3 dv = b.direction * b.speed - a.direction * a.speed;
    const double dv2 = dv.dot(dv);
    double t_star = 0.0;
    if (dv2 > 0.0) t_star = std::clamp(-dp0.dot(dv) / dv2, 0.0, horizon_s);
    forecast.time_of_min = t_star;
    forecast.min_distance = (dp0 + dv * t_star).norm();
    forecast.predicted = dp0.norm() <= cfg.predict_att_thd && forecast.min_distance < cfg.touch_thd;
    return forecast;
}

MotionModel fit_track_motion(const ObjectTrack& track, const TimeSlot& slot, double fps,
                             const EngineConfig& cfg) {
    std::vector<std::pair<double, Point3>> samples;
    for (const auto& s : track.samples) {
        if (s.frame_index < slot.start_frame || s.frame_index >= slot.end_frame || !s.center) continue;
        samples.emplace_back(s.frame_index / fps, *s.center);
    }
    MotionModel model = fit_motion(samples, cfg);
    model.track_id = track.track_id;
    return model;
}

} // namespace srnn
