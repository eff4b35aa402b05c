#include "srnn/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <tuple>

#include <nlohmann/json.hpp>

namespace srnn {

using nlohmann::json;

std::string classify_color(const std::array<double, 3>& mean_rgb, const std::vector<ColorAnchor>& palette) {
    double best = std::numeric_limits<double>::infinity();
    const ColorAnchor* winner = nullptr;
    for (const auto& anchor : palette) {
        double d2 = 0.0;
        for (int c = 0; c < 3; ++c) {
            const double d = mean_rgb[c] - anchor.rgb[c];
            d2 += d * d;
        }
        if (d2 < best) { // strict: ties keep the earlier anchor
            best = d2;
            winner = &anchor;
        }
    }
    return winner ? winner->name : "";
}

std::vector<BoundObject> bind_attributes(const std::vector<Detection>& shape_dets,
                                         const std::vector<Detection>& texture_dets,
                                         const EngineConfig& cfg, Diagnostics* diag) {
    std::vector<const Detection*> shapes, textures;
    auto keep = [&](const std::vector<Detection>& dets, std::vector<const Detection*>& out) {
        for (const auto& d : dets) {
            if (d.confidence >= cfg.confidence_thd) {
                out.push_back(&d);
            } else if (diag) {
                ++diag->low_confidence_detections;
            }
        }
    };
    keep(shape_dets, shapes);
    keep(texture_dets, textures);

    struct Candidate {
        double iou;
        std::size_t s, t;
    };
    std::vector<Candidate> candidates;
    for (std::size_t s = 0; s < shapes.size(); ++s) {
        for (std::size_t t = 0; t < textures.size(); ++t) {
            const double overlap = iou(shapes[s]->box, textures[t]->box);
            if (overlap < cfg.attention_iou_thd) continue;
            if (classify_color(shapes[s]->mean_rgb, cfg.palette) !=
                classify_color(textures[t]->mean_rgb, cfg.palette)) {
                continue;
            }
            candidates.push_back({overlap, s, t});
        }
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(b.iou, a.s, a.t) < std::tie(a.iou, b.s, b.t);
    });

    std::vector<bool> shape_used(shapes.size(), false), texture_used(textures.size(), false);
    std::vector<BoundObject> bound;
    for (const auto& c : candidates) {
        if (shape_used[c.s] || texture_used[c.t]) continue;
        shape_used[c.s] = true;
        texture_used[c.t] = true;
        const Detection& sd = *shapes[c.s];
        const Detection& td = *textures[c.t];
        BoundObject obj;
        obj.frame_index = sd.frame_index;
        obj.shape_label = sd.label;
        obj.texture_label = td.label;
        obj.color_label = classify_color(sd.mean_rgb, cfg.palette);
        obj.box = sd.box.union_with(td.box);
        // The shape detection carries the center; fall back to texture.
        // A 3D center wins over a depth so exactly one survives binding.
        obj.center_3d = sd.center_3d ? sd.center_3d : td.center_3d;
        if (!obj.center_3d) obj.center_depth = sd.center_depth ? sd.center_depth : td.center_depth;
        bound.push_back(std::move(obj));
    }

    if (diag) {
        const auto unmatched = static_cast<std::uint64_t>(
            std::count(shape_used.begin(), shape_used.end(), false) +
            std::count(texture_used.begin(), texture_used.end(), false));
        diag->unbound_detections += unmatched;
    }
    return bound;
}

std::vector<ObjectTrack> track_objects(const std::vector<std::vector<BoundObject>>& frames,
                                       const EngineConfig& cfg) {
    std::vector<ObjectTrack> tracks;
    for (const auto& objects : frames) {
        struct Candidate {
            double iou;
            std::size_t track;
            std::size_t obj;
        };
        std::vector<Candidate> candidates;
        for (std::size_t o = 0; o < objects.size(); ++o) {
            for (std::size_t t = 0; t < tracks.size(); ++t) {
                if (tracks[t].composite_label() != objects[o].composite_label()) continue;
                const double overlap = iou(tracks[t].samples.back().box, objects[o].box);
                if (overlap < cfg.box_overlap_thd) continue;
                candidates.push_back({overlap, t, o});
            }
        }
        // Descending IoU; ties prefer the older track, then input order.
        std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
            return std::tie(b.iou, a.track, a.obj) < std::tie(a.iou, b.track, b.obj);
        });

        std::vector<bool> track_used(tracks.size(), false), obj_used(objects.size(), false);
        auto append = [](ObjectTrack& tr, const BoundObject& obj) {
            tr.samples.push_back({obj.frame_index, obj.box, obj.center_depth,
                                  obj.center_3d ? std::optional<Point3>(*obj.center_3d) : std::nullopt});
        };
        for (const auto& c : candidates) {
            if (track_used[c.track] || obj_used[c.obj]) continue;
            track_used[c.track] = true;
            obj_used[c.obj] = true;
            append(tracks[c.track], objects[c.obj]);
        }
        for (std::size_t o = 0; o < objects.size(); ++o) {
            if (obj_used[o]) continue;
            ObjectTrack tr;
            tr.track_id = static_cast<int>(tracks.size());
            tr.shape_label = objects[o].shape_label;
            tr.texture_label = objects[o].texture_label;
            tr.color_label = objects[o].color_label;
            tracks.push_back(std::move(tr));
            append(tracks.back(), objects[o]);
        }
    }
    return tracks;
}

void resolve_centers(std::vector<ObjectTrack>& tracks, const CameraIntrinsics& k) {
    for (auto& tr : tracks) {
        for (auto& s : tr.samples) {
            if (s.center) continue;
            if (!s.center_depth) {
                throw MissingDepthError("track " + std::to_string(tr.track_id) + " frame " +
                                        std::to_string(s.frame_index) +
                                        ": sample has neither center_3d nor center_depth");
            }
            s.center = back_project({s.box.center_u(), s.box.center_v(), *s.center_depth}, k);
        }
    }
}

namespace {

const json& field(const json& obj, const char* key, const char* ctx) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(std::string(ctx) + ": missing field '" + key + "'");
    return *it;
}

double num(const json& obj, const char* key, const char* ctx) {
    const json& v = field(obj, key, ctx);
    if (!v.is_number()) throw SchemaError(std::string(ctx) + ": field '" + key + "' must be a number");
    return v.get<double>();
}

Box2 parse_box(const json& v, const char* ctx) {
    if (!v.is_array() || v.size() != 4) {
        throw SchemaError(std::string(ctx) + ": 'box' must be [x_min, y_min, x_max, y_max]");
    }
    Box2 box{v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>()};
    if (!box.valid()) throw SchemaError(std::string(ctx) + ": box must satisfy x_min < x_max, y_min < y_max");
    return box;
}

} // namespace

VideoDoc parse_video_json(const json& doc) {
    if (!doc.is_object()) throw SchemaError("video document must be a JSON object");
    VideoDoc out;
    out.video_id = field(doc, "video_id", "video").get<std::string>();
    out.fps = num(doc, "fps", "video");
    if (out.fps <= 0) throw SchemaError("video: fps must be positive");
    out.width = static_cast<int>(num(doc, "width", "video"));
    out.height = static_cast<int>(num(doc, "height", "video"));
    const json& intr = field(doc, "intrinsics", "video");
    out.intrinsics.f = num(intr, "f", "intrinsics");
    out.intrinsics.cx = num(intr, "cx", "intrinsics");
    out.intrinsics.cy = num(intr, "cy", "intrinsics");
    if (out.intrinsics.f <= 0) throw SchemaError("intrinsics: f must be positive");
    if (doc.contains("scene_seed")) out.scene_seed = doc["scene_seed"].get<std::uint64_t>();

    const json& frames = field(doc, "frames", "video");
    if (!frames.is_array()) throw SchemaError("video: 'frames' must be an array");
    int max_index = -1;
    std::vector<std::pair<int, std::vector<Detection>>> parsed;
    for (const json& f : frames) {
        const int index = static_cast<int>(num(f, "index", "frame"));
        if (index < 0) throw SchemaError("frame: index must be >= 0");
        max_index = std::max(max_index, index);
        std::vector<Detection> dets;
        const json& jdets = field(f, "detections", "frame");
        if (!jdets.is_array()) throw SchemaError("frame: 'detections' must be an array");
        for (const json& jd : jdets) {
            Detection d;
            d.frame_index = index;
            const std::string kind = field(jd, "kind", "detection").get<std::string>();
            if (kind == "shape") {
                d.kind = DetectionKind::Shape;
            } else if (kind == "texture") {
                d.kind = DetectionKind::Texture;
            } else {
                throw SchemaError("detection: kind must be 'shape' or 'texture', got '" + kind + "'");
            }
            d.label = field(jd, "label", "detection").get<std::string>();
            d.confidence = num(jd, "confidence", "detection");
            if (d.confidence < 0.0 || d.confidence > 1.0) {
                throw SchemaError("detection: confidence must lie in [0,1]");
            }
            d.box = parse_box(field(jd, "box", "detection"), "detection");
            const json& rgb = field(jd, "mean_rgb", "detection");
            if (!rgb.is_array() || rgb.size() != 3) throw SchemaError("detection: mean_rgb must be [r,g,b]");
            for (int c = 0; c < 3; ++c) {
                d.mean_rgb[c] = rgb[c].get<double>();
                if (d.mean_rgb[c] < 0.0 || d.mean_rgb[c] > 255.0) {
                    throw SchemaError("detection: mean_rgb channels must lie in [0,255]");
                }
            }
            if (jd.contains("center_depth")) {
                d.center_depth = jd["center_depth"].get<double>();
                if (*d.center_depth <= 0.0) throw SchemaError("detection: center_depth must be positive");
            }
            if (jd.contains("center_3d")) {
                const json& c3 = jd["center_3d"];
                if (!c3.is_array() || c3.size() != 3) {
                    throw SchemaError("detection: center_3d must be [x,y,z]");
                }
                d.center_3d = Point3{c3[0].get<double>(), c3[1].get<double>(), c3[2].get<double>()};
            }
            dets.push_back(std::move(d));
        }
        parsed.emplace_back(index, std::move(dets));
    }

    out.frame_count = max_index + 1;
    out.frames.assign(static_cast<std::size_t>(out.frame_count), {});
    for (auto& [index, dets] : parsed) {
        auto& slot = out.frames[static_cast<std::size_t>(index)];
        slot.insert(slot.end(), std::make_move_iterator(dets.begin()), std::make_move_iterator(dets.end()));
    }
    return out;
}

VideoDoc load_video(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open video document: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
    }
    return parse_video_json(doc);
}

std::vector<ObjectTrack> ingest_video(const VideoDoc& doc, const EngineConfig& cfg, Diagnostics* diag) {
    std::vector<std::vector<BoundObject>> per_frame;
    per_frame.reserve(doc.frames.size());
    for (const auto& dets : doc.frames) {
        std::vector<Detection> shapes, textures;
        for (const auto& d : dets) {
            (d.kind == DetectionKind::Shape ? shapes : textures).push_back(d);
        }
        per_frame.push_back(bind_attributes(shapes, textures, cfg, diag));
    }
    auto tracks = track_objects(per_frame, cfg);
    resolve_centers(tracks, doc.intrinsics);
    return tracks;
}

std::optional<Point3> track_position_at(const ObjectTrack& track, int frame, int max_gap, Diagnostics* diag) {
    const auto& samples = track.samples;
    if (samples.empty()) return std::nullopt;
    auto it = std::lower_bound(samples.begin(), samples.end(), frame,
                               [](const TrackSample& s, int f) { return s.frame_index < f; });
    if (it != samples.end() && it->frame_index == frame) return it->center;
    if (it == samples.begin() || it == samples.end()) return std::nullopt; // before first / after last
    const TrackSample& prev = *(it - 1);
    const TrackSample& next = *it;
    const int gap = next.frame_index - prev.frame_index - 1;
    if (gap > max_gap) {
        if (diag) ++diag->long_gap_frames;
        return std::nullopt;
    }
    if (!prev.center || !next.center) return std::nullopt;
    if (diag) ++diag->interpolated_gap_frames;
    const double t = static_cast<double>(frame - prev.frame_index) /
                     static_cast<double>(next.frame_index - prev.frame_index);
    return *prev.center + (*next.center - *prev.center) * t;
}

std::optional<Box2> track_box_at(const ObjectTrack& track, int frame) {
    const auto& samples = track.samples;
    auto it = std::lower_bound(samples.begin(), samples.end(), frame,
                               [](const TrackSample& s, int f) { return s.frame_index < f; });
    if (it != samples.end() && it->frame_index == frame) return it->box;
    return std::nullopt;
}

} // namespace srnn
