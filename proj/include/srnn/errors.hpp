#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace srnn {

// Base class for all engine errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input text (config file syntax, bad key-value line).
struct ParseError : Error {
    using Error::Error;
};

// Structurally valid input with an out-of-range or inconsistent value.
struct ValidationError : Error {
    using Error::Error;
};

// Input document does not match the documented JSON schema.
struct SchemaError : Error {
    using Error::Error;
};

// A track sample carries neither a 3D center nor a center depth.
struct MissingDepthError : SchemaError {
    using SchemaError::SchemaError;
};

// Too few samples to evaluate an operation (kinematics, motion fit).
struct InsufficientData : Error {
    using Error::Error;
};

struct OutOfOrderSlot : Error {
    using Error::Error;
};

struct UnknownRelationKind : Error {
    using Error::Error;
};

struct UnknownKind : Error {
    using Error::Error;
};

struct UnknownQType : Error {
    using Error::Error;
};

struct SeedMismatch : Error {
    using Error::Error;
};

// Per-run counters for conditions that are reported, not thrown.
// Aggregated into the run manifest; a nonzero counter never aborts a run.
struct Diagnostics {
    std::uint64_t unbound_detections = 0;       // detections dropped during attribute binding
    std::uint64_t low_confidence_detections = 0;
    std::uint64_t interpolated_gap_frames = 0;  // frames filled by linear interpolation
    std::uint64_t long_gap_frames = 0;          // frames dropped (gap > interpolation limit)
    std::uint64_t insufficient_kinematic_data = 0;
    std::uint64_t degenerate_direction_windows = 0;
    std::uint64_t internal_inconsistencies = 0; // distance trend with >1 sign change
    std::uint64_t unconfirmed_touch_candidates = 0;
    std::uint64_t isolation_suppressed_touches = 0;
    std::uint64_t cycle_guard_trips = 0;

    void merge(const Diagnostics& other) {
        unbound_detections += other.unbound_detections;
        low_confidence_detections += other.low_confidence_detections;
        interpolated_gap_frames += other.interpolated_gap_frames;
        long_gap_frames += other.long_gap_frames;
        insufficient_kinematic_data += other.insufficient_kinematic_data;
        degenerate_direction_windows += other.degenerate_direction_windows;
        internal_inconsistencies += other.internal_inconsistencies;
        unconfirmed_touch_candidates += other.unconfirmed_touch_candidates;
        isolation_suppressed_touches += other.isolation_suppressed_touches;
        cycle_guard_trips += other.cycle_guard_trips;
    }
};

} // namespace srnn
