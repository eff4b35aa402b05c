#include "srnn/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "srnn/errors.hpp"

namespace srnn {

std::vector<ColorAnchor> default_palette() {
    return {
        {"gray", {128.0, 128.0, 128.0}}, {"red", {220.0, 20.0, 60.0}},
        {"blue", {42.0, 75.0, 215.0}},   {"green", {29.0, 105.0, 20.0}},
        {"brown", {129.0, 74.0, 25.0}},  {"purple", {129.0, 38.0, 192.0}},
        {"cyan", {41.0, 208.0, 208.0}},  {"yellow", {255.0, 238.0, 51.0}},
    };
}

int EngineConfig::slot_frame_count() const {
    return static_cast<int>(std::lround(frames_per_second * slot_duration_s));
}

namespace {

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ValidationError("config key '" + key + "': " + what);
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not a number: '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not an integer: '" + value + "'");
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw ParseError("config key '" + key + "': not an unsigned integer: '" + value + "'");
    }
}

std::array<double, 3> parse_rgb(const std::string& key, const std::string& value) {
    std::array<double, 3> rgb{};
    std::stringstream ss(value);
    std::string part;
    for (int i = 0; i < 3; ++i) {
        if (!std::getline(ss, part, ',')) {
            throw ParseError("config key '" + key + "': expected R,G,B");
        }
        rgb[i] = parse_double(key, trim(part));
    }
    if (std::getline(ss, part, ',')) {
        throw ParseError("config key '" + key + "': expected exactly three channels");
    }
    return rgb;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void EngineConfig::validate() const {
    require(attention_iou_thd >= 0.0 && attention_iou_thd <= 1.0, "attention_iou_thd", "must lie in [0,1]");
    require(color_focus_area_ratio > 0.0 && color_focus_area_ratio <= 1.0, "color_focus_area_ratio",
            "must lie in (0,1]");
    require(confidence_thd >= 0.0 && confidence_thd <= 1.0, "confidence_thd", "must lie in [0,1]");
    require(focal_length > 0.0, "focal_length", "must be positive");
    require(box_overlap_thd >= 0.0 && box_overlap_thd <= 1.0, "box_overlap_thd", "must lie in [0,1]");
    require(move_thd > 0.0, "move_thd", "must be positive");
    require(dist_att_thd > 0.0, "dist_att_thd", "must be positive");
    require(moving_avg_window >= 1, "moving_avg_window", "must be >= 1");
    require(touch_thd > 0.0, "touch_thd", "must be positive");
    require(touch_box_overlap_thd >= 0.0 && touch_box_overlap_thd <= 1.0, "touch_box_overlap_thd",
            "must lie in [0,1]");
    require(slot_count >= 1, "slot_count", "must be >= 1");
    require(slot_duration_s > 0.0, "slot_duration_s", "must be positive");
    require(frames_per_second > 0.0, "frames_per_second", "must be positive");
    require(direction_change_angle_thd > 0.0, "direction_change_angle_thd", "must be positive");
    require(distance_amplitude_thd > 0.0, "distance_amplitude_thd", "must be positive");
    require(predict_att_thd > 0.0, "predict_att_thd", "must be positive");
    require(neuron_activation_threshold > 0.0, "neuron_activation_threshold", "must be positive");
    require(slot_frame_count() >= 1, "slot_duration_s", "slot must span at least one frame");
    require(palette.size() == 8, "palette", "must hold exactly 8 anchors");
    for (const auto& anchor : palette) {
        for (double c : anchor.rgb) {
            require(c >= 0.0 && c <= 255.0, "color_" + anchor.name, "channels must lie in [0,255]");
        }
    }
}

bool EngineConfig::operator==(const EngineConfig& other) const {
    if (palette.size() != other.palette.size()) return false;
    for (std::size_t i = 0; i < palette.size(); ++i) {
        if (palette[i].name != other.palette[i].name || palette[i].rgb != other.palette[i].rgb) return false;
    }
    return attention_iou_thd == other.attention_iou_thd &&
           color_focus_area_ratio == other.color_focus_area_ratio &&
           confidence_thd == other.confidence_thd && focal_length == other.focal_length &&
           box_overlap_thd == other.box_overlap_thd && move_thd == other.move_thd &&
           dist_att_thd == other.dist_att_thd && moving_avg_window == other.moving_avg_window &&
           touch_thd == other.touch_thd && touch_box_overlap_thd == other.touch_box_overlap_thd &&
           slot_count == other.slot_count && slot_duration_s == other.slot_duration_s &&
           frames_per_second == other.frames_per_second &&
           direction_change_angle_thd == other.direction_change_angle_thd &&
           distance_amplitude_thd == other.distance_amplitude_thd &&
           predict_att_thd == other.predict_att_thd &&
           neuron_activation_threshold == other.neuron_activation_threshold && rng_seed == other.rng_seed;
}

EngineConfig parse_config_text(const std::string& text) {
    EngineConfig cfg;

    std::map<std::string, std::function<void(const std::string&, const std::string&)>> setters;
    auto dbl = [&](const std::string& key, double* field) {
        setters[key] = [field](const std::string& k, const std::string& v) { *field = parse_double(k, v); };
    };
    dbl("attention_iou_thd", &cfg.attention_iou_thd);
    dbl("color_focus_area_ratio", &cfg.color_focus_area_ratio);
    dbl("confidence_thd", &cfg.confidence_thd);
    dbl("focal_length", &cfg.focal_length);
    dbl("box_overlap_thd", &cfg.box_overlap_thd);
    dbl("move_thd", &cfg.move_thd);
    dbl("dist_att_thd", &cfg.dist_att_thd);
    dbl("touch_thd", &cfg.touch_thd);
    dbl("touch_box_overlap_thd", &cfg.touch_box_overlap_thd);
    dbl("slot_duration_s", &cfg.slot_duration_s);
    dbl("frames_per_second", &cfg.frames_per_second);
    dbl("direction_change_angle_thd", &cfg.direction_change_angle_thd);
    dbl("distance_amplitude_thd", &cfg.distance_amplitude_thd);
    dbl("predict_att_thd", &cfg.predict_att_thd);
    dbl("neuron_activation_threshold", &cfg.neuron_activation_threshold);
    setters["moving_avg_window"] = [&cfg](const std::string& k, const std::string& v) {
        cfg.moving_avg_window = parse_int(k, v);
    };
    setters["slot_count"] = [&cfg](const std::string& k, const std::string& v) {
        cfg.slot_count = parse_int(k, v);
    };
    setters["rng_seed"] = [&cfg](const std::string& k, const std::string& v) {
        cfg.rng_seed = parse_u64(k, v);
    };
    for (std::size_t i = 0; i < cfg.palette.size(); ++i) {
        setters["color_" + cfg.palette[i].name] = [&cfg, i](const std::string& k, const std::string& v) {
            cfg.palette[i].rgb = parse_rgb(k, v);
        };
    }

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ParseError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ParseError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        it->second(key, value);
    }

    cfg.validate();
    return cfg;
}

EngineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string serialize_config(const EngineConfig& cfg) {
    std::ostringstream out;
    out << "attention_iou_thd = " << format_double(cfg.attention_iou_thd) << "\n";
    out << "color_focus_area_ratio = " << format_double(cfg.color_focus_area_ratio) << "\n";
    out << "confidence_thd = " << format_double(cfg.confidence_thd) << "\n";
    out << "focal_length = " << format_double(cfg.focal_length) << "\n";
    out << "box_overlap_thd = " << format_double(cfg.box_overlap_thd) << "\n";
    out << "move_thd = " << format_double(cfg.move_thd) << "\n";
    out << "dist_att_thd = " << format_double(cfg.dist_att_thd) << "\n";
    out << "moving_avg_window = " << cfg.moving_avg_window << "\n";
    out << "touch_thd = " << format_double(cfg.touch_thd) << "\n";
    out << "touch_box_overlap_thd = " << format_double(cfg.touch_box_overlap_thd) << "\n";
    out << "slot_count = " << cfg.slot_count << "\n";
    out << "slot_duration_s = " << format_double(cfg.slot_duration_s) << "\n";
    out << "frames_per_second = " << format_double(cfg.frames_per_second) << "\n";
    out << "direction_change_angle_thd = " << format_double(cfg.direction_change_angle_thd) << "\n";
    out << "distance_amplitude_thd = " << format_double(cfg.distance_amplitude_thd) << "\n";
    out << "predict_att_thd = " << format_double(cfg.predict_att_thd) << "\n";
    out << "neuron_activation_threshold = " << format_double(cfg.neuron_activation_threshold) << "\n";
    out << "rng_seed = " << cfg.rng_seed << "\n";
    for (const auto& anchor : cfg.palette) {
        out << "color_" << anchor.name << " = " << format_double(anchor.rgb[0]) << ","
            << format_double(anchor.rgb[1]) << "," << format_double(anchor.rgb[2]) << "\n";
    }
    return out.str();
}

void write_config(const EngineConfig& cfg, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write config file: " + path.string());
    out << serialize_config(cfg);
}

} // namespace srnn
