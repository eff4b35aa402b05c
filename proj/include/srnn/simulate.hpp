#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srnn/config.hpp"
#include "srnn/geometry.hpp"
#include "srnn/relations.hpp"

namespace srnn {

struct SimObject {
    std::string color;
    std::string texture;
    std::string shape;
    Point3 p0;   // position at start time
    Point3 v0;   // initial velocity, length units per second
    int start_frame = 0;

    std::string composite_label() const { return color + "_" + texture + "_" + shape; }
};

// One ground-truth collision: contact instant plus the post-contact
// velocities of both participants.
struct SimEvent {
    double time_s = 0.0;
    int frame = 0;
    int a = 0;
    int b = 0;
    Point3 va_post;
    Point3 vb_post;
};

// A synthetic planar scene: objects move with piecewise-constant
// velocity, velocities change only at recorded collision events, and
// all motion stays in one z = const plane.
struct SimScene {
    std::uint64_t seed = 0;
    double duration_s = 5.0;
    double fps = 25.0;
    std::vector<SimObject> objects;
    std::vector<SimEvent> events;

    int frame_count() const;
    double start_time(int obj) const { return objects[static_cast<std::size_t>(obj)].start_frame / fps; }

    // Closed-form position / velocity at time t (walks the event list).
    Point3 position_at(int obj, double t) const;
    Point3 velocity_at(int obj, double t) const;
};

// Deterministic scene construction: a collision pair with margin-safe
// geometry plus resting objects and independent movers. Collisions use
// a sphere sweep of radius touch_thd/4 per object, so contact occurs
// at center distance touch_thd/2, and post-contact velocities follow an
// equal-mass elastic exchange along the contact normal. Proposals that
// violate the margin policy are resampled; a fixed template scene backs
// the rare seed where no proposal qualifies.
SimScene generate(std::uint64_t seed, int n_objects, const EngineConfig& cfg);

// The margin policy: every thresholded quantity the detectors evaluate
// (windowed displacements, slot distance minima, smoothed-distance
// gates, confirmation geometry, bounds) must sit clear of its threshold
// so neither frame sampling nor acceptance-level noise can flip labels.
bool scene_within_margins(const SimScene& scene, const EngineConfig& cfg);

// Renders the scene into the ingest JSON schema: per frame, one shape
// and one texture detection per visible object, coincident fixed-size
// boxes around the projected center, palette-exact mean RGB, and the
// 3D center with isotropic Gaussian noise of the given sigma.
nlohmann::json render_observations(const SimScene& scene, double noise_sigma, const EngineConfig& cfg);

// Ground-truth relation labeling evaluated directly on the closed-form
// motion at the frame grid. Participants are object indices. This is an
// independent reimplementation of the detector definitions and must not
// call into the relations module.
std::vector<SlotEvents> oracle_relations(const SimScene& scene, const EngineConfig& cfg);

nlohmann::json scene_to_json(const SimScene& scene);
SimScene scene_from_json(const nlohmann::json& doc);

} // namespace srnn
