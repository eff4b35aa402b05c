#include "srnn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <nlohmann/json.hpp>

#include "srnn/errors.hpp"

namespace srnn {

using nlohmann::json;

namespace {

constexpr double kPlaneDepth = 5.0;
constexpr double kBoundX = 1.4;
constexpr double kBoundY = 1.1;
constexpr int kImageWidth = 480;
constexpr int kImageHeight = 320;
constexpr double kBoxSidePx = 4.0;
constexpr double kDetectionConfidence = 0.95;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double contact_distance(const EngineConfig& cfg) { return 0.5 * cfg.touch_thd; } // 2 x sweep radius

} // namespace

int SimScene::frame_count() const { return static_cast<int>(std::lround(duration_s * fps)); }

Point3 SimScene::position_at(int obj, double t) const {
    const auto& o = objects[static_cast<std::size_t>(obj)];
    Point3 p = o.p0;
    Point3 v = o.v0;
    double t0 = start_time(obj);
    for (const auto& ev : events) {
        if (ev.time_s >= t) break;
        if (ev.a != obj && ev.b != obj) continue;
        p += v * (ev.time_s - t0);
        v = ev.a == obj ? ev.va_post : ev.vb_post;
        t0 = ev.time_s;
    }
    return p + v * (t - t0);
}

Point3 SimScene::velocity_at(int obj, double t) const {
    const auto& o = objects[static_cast<std::size_t>(obj)];
    Point3 v = o.v0;
    for (const auto& ev : events) {
        if (ev.time_s >= t) break;
        if (ev.a == obj) v = ev.va_post;
        if (ev.b == obj) v = ev.vb_post;
    }
    return v;
}

namespace {

// ---------------------------------------------------------------------------
// Collision sweep
// ---------------------------------------------------------------------------

struct BodyState {
    Point3 p;
    Point3 v;
};

// Event-driven sweep: advances all bodies to each earliest pair contact
// (center distance = contact_distance) and applies an equal-mass elastic
// exchange of the normal velocity components. Returns false when bodies
// start in contact or the event budget is exceeded.
bool sweep_collisions(SimScene& scene, const EngineConfig& cfg) {
    const double d_contact = contact_distance(cfg);
    const int n = static_cast<int>(scene.objects.size());
    std::vector<BodyState> bodies;
    for (const auto& o : scene.objects) bodies.push_back({o.p0, o.v0});

    scene.events.clear();
    double now = 0.0;
    for (int budget = 0; budget < 8; ++budget) {
        double best_t = scene.duration_s + 1.0;
        int best_a = -1, best_b = -1;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const Point3 dp = bodies[a].p - bodies[b].p;
                const Point3 dv = bodies[a].v - bodies[b].v;
                const double c = dp.dot(dp) - d_contact * d_contact;
                if (c <= 0.0) return false; // already overlapping
                const double qa = dv.dot(dv);
                if (qa == 0.0) continue;
                const double qb = 2.0 * dp.dot(dv);
                const double disc = qb * qb - 4.0 * qa * c;
                if (disc <= 0.0) continue;
                const double t_hit = now + (-qb - std::sqrt(disc)) / (2.0 * qa);
                if (t_hit <= now + 1e-9 || t_hit > scene.duration_s) continue;
                if (t_hit < best_t) {
                    best_t = t_hit;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        if (best_a < 0) return true;

        for (auto& body : bodies) body.p += body.v * (best_t - now);
        now = best_t;

        Point3 normal = bodies[best_a].p - bodies[best_b].p;
        normal = normal * (1.0 / normal.norm());
        const double vn = (bodies[best_a].v - bodies[best_b].v).dot(normal);
        bodies[best_a].v += normal * (-vn);
        bodies[best_b].v += normal * vn;

        SimEvent ev;
        ev.time_s = now;
        ev.frame = static_cast<int>(now * scene.fps);
        ev.a = best_a;
        ev.b = best_b;
        ev.va_post = bodies[best_a].v;
        ev.vb_post = bodies[best_b].v;
        scene.events.push_back(ev);
    }
    return false; // event budget exceeded
}

// ---------------------------------------------------------------------------
// Frame-grid quantities (shared by the oracle and the margin checker).
// Independent of the relations module by design: this code evaluates the
// relation definitions directly on the closed-form motion.
// ---------------------------------------------------------------------------

struct GridSlot {
    int index = 0;
    int start = 0;
    int end = 0;
};

std::vector<GridSlot> grid_slots(int frame_count, const EngineConfig& cfg) {
    std::vector<GridSlot> slots;
    const int length = cfg.slot_frame_count();
    for (int k = 0; k < cfg.slot_count; ++k) {
        const int start = k * length;
        if (start >= frame_count) break;
        int end = std::min(start + length, frame_count);
        if (k == cfg.slot_count - 1) end = frame_count;
        slots.push_back({k, start, end});
    }
    return slots;
}

struct FrameGrid {
    int frame_count = 0;
    std::vector<int> first_frame;
    std::vector<std::vector<Point3>> pos; // [object][frame]
};

FrameGrid evaluate_grid(const SimScene& scene) {
    FrameGrid grid;
    grid.frame_count = scene.frame_count();
    const int n = static_cast<int>(scene.objects.size());
    grid.first_frame.resize(static_cast<std::size_t>(n));
    grid.pos.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        grid.first_frame[static_cast<std::size_t>(i)] = scene.objects[static_cast<std::size_t>(i)].start_frame;
        auto& row = grid.pos[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(grid.frame_count));
        for (int f = scene.objects[static_cast<std::size_t>(i)].start_frame; f < grid.frame_count; ++f) {
            row[static_cast<std::size_t>(f)] = scene.position_at(i, f / scene.fps);
        }
    }
    return grid;
}

double grid_distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double grid_windowed_displacement(const std::vector<Point3>& positions, int window) {
    const int n = static_cast<int>(positions.size());
    if (n < 2) return 0.0;
    const int w = std::max(1, std::min(window, n / 2));
    Point3 head{}, tail{};
    for (int i = 0; i < w; ++i) {
        head += positions[static_cast<std::size_t>(i)];
        tail += positions[static_cast<std::size_t>(n - w + i)];
    }
    return grid_distance(head * (1.0 / w), tail * (1.0 / w));
}

std::vector<Point3> grid_slot_positions(const FrameGrid& grid, int obj, const GridSlot& slot) {
    std::vector<Point3> out;
    for (int f = std::max(slot.start, grid.first_frame[static_cast<std::size_t>(obj)]); f < slot.end; ++f) {
        out.push_back(grid.pos[static_cast<std::size_t>(obj)][static_cast<std::size_t>(f)]);
    }
    return out;
}

struct GridKinematics {
    bool available = false;
    double disp_full = 0.0;
    bool has_halves = false;
    double disp_first = 0.0;
    double disp_second = 0.0;
    RelationKind kind = RelationKind::Rest;
};

GridKinematics grid_kinematics(const FrameGrid& grid, int obj, const GridSlot& slot,
                               const EngineConfig& cfg) {
    GridKinematics out;
    const auto positions = grid_slot_positions(grid, obj, slot);
    const int n = static_cast<int>(positions.size());
    if (n < 2) return out;
    out.available = true;
    out.disp_full = grid_windowed_displacement(positions, cfg.moving_avg_window);
    const bool moving = out.disp_full > cfg.move_thd;
    out.kind = moving ? RelationKind::Move : RelationKind::Rest;
    if (n >= 3) {
        out.has_halves = true;
        const int mid = n / 2;
        std::vector<Point3> first(positions.begin(), positions.begin() + mid + 1);
        std::vector<Point3> second(positions.begin() + mid, positions.end());
        out.disp_first = grid_windowed_displacement(first, cfg.moving_avg_window);
        out.disp_second = grid_windowed_displacement(second, cfg.moving_avg_window);
        if (moving) {
            const bool m1 = out.disp_first > cfg.move_thd;
            const bool m2 = out.disp_second > cfg.move_thd;
            if (!m1 && m2) out.kind = RelationKind::RestFirstThenMove;
            if (m1 && !m2) out.kind = RelationKind::MoveFirstThenRest;
        }
    }
    return out;
}

struct GridPairSeries {
    std::vector<int> frames;
    std::vector<double> values;

    bool empty() const { return values.empty(); }
    double min_value() const { return *std::min_element(values.begin(), values.end()); }
    int closest_frame() const {
        return frames[static_cast<std::size_t>(
            std::min_element(values.begin(), values.end()) - values.begin())];
    }
};

GridPairSeries grid_pair_series(const FrameGrid& grid, int a, int b, const GridSlot& slot) {
    GridPairSeries series;
    const int first = std::max({slot.start, grid.first_frame[static_cast<std::size_t>(a)],
                                grid.first_frame[static_cast<std::size_t>(b)]});
    for (int f = first; f < slot.end; ++f) {
        series.frames.push_back(f);
        series.values.push_back(grid_distance(grid.pos[static_cast<std::size_t>(a)][static_cast<std::size_t>(f)],
                                              grid.pos[static_cast<std::size_t>(b)][static_cast<std::size_t>(f)]));
    }
    return series;
}

const char* grid_direction_label(double angle_deg) {
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

struct GridTurn {
    bool windows_ok = false; // both windows usable and above move_thd
    double disp_pre = 0.0;
    double disp_post = 0.0;
    double angle = 0.0;
};

GridTurn grid_turn(const FrameGrid& grid, int obj, const GridSlot& slot, int touch_frame,
                   const EngineConfig& cfg) {
    GridTurn turn;
    const int first = std::max(slot.start, grid.first_frame[static_cast<std::size_t>(obj)]);
    if (touch_frame - first < 1 || slot.end - 1 - touch_frame < 1) return turn;
    const auto& row = grid.pos[static_cast<std::size_t>(obj)];
    const Point3 pre = row[static_cast<std::size_t>(touch_frame)] - row[static_cast<std::size_t>(first)];
    const Point3 post = row[static_cast<std::size_t>(slot.end - 1)] - row[static_cast<std::size_t>(touch_frame)];
    turn.disp_pre = pre.norm();
    turn.disp_post = post.norm();
    if (!(turn.disp_pre > cfg.move_thd) || !(turn.disp_post > cfg.move_thd)) return turn;
    turn.windows_ok = true;
    double deg = std::atan2(pre.x * post.y - pre.y * post.x, pre.x * post.x + pre.y * post.y) * 180.0 / M_PI;
    if (deg == -180.0) deg = 180.0;
    turn.angle = deg;
    return turn;
}

struct GridTrend {
    bool series_long_enough = false;
    double min_smoothed = 0.0;
    double amplitude = 0.0;
    int sign_changes = 0;
    int first_sign = 0;
};

GridTrend grid_trend(const GridPairSeries& series, const EngineConfig& cfg) {
    GridTrend trend;
    const int n = static_cast<int>(series.values.size());
    const int w = cfg.moving_avg_window;
    if (n < w) return trend;
    trend.series_long_enough = true;
    std::vector<double> smoothed;
    double acc = std::accumulate(series.values.begin(), series.values.begin() + w, 0.0);
    smoothed.push_back(acc / w);
    for (int i = w; i < n; ++i) {
        acc += series.values[static_cast<std::size_t>(i)] - series.values[static_cast<std::size_t>(i - w)];
        smoothed.push_back(acc / w);
    }
    const auto [min_it, max_it] = std::minmax_element(smoothed.begin(), smoothed.end());
    trend.min_smoothed = *min_it;
    trend.amplitude = *max_it - *min_it;
    int last_sign = 0;
    for (std::size_t i = 1; i < smoothed.size(); ++i) {
        const double d = smoothed[i] - smoothed[i - 1];
        if (d == 0.0) continue;
        const int sign = d > 0.0 ? 1 : -1;
        if (last_sign != 0 && sign != last_sign) ++trend.sign_changes;
        if (trend.first_sign == 0) trend.first_sign = sign;
        last_sign = sign;
    }
    return trend;
}

std::pair<int, int> grid_mover_first(const FrameGrid& grid, int a, int b, const GridSlot& slot,
                                     const EngineConfig& cfg) {
    const double da = grid_windowed_displacement(grid_slot_positions(grid, a, slot), cfg.moving_avg_window);
    const double db = grid_windowed_displacement(grid_slot_positions(grid, b, slot), cfg.moving_avg_window);
    const bool a_first = da > db || (da == db && a <= b);
    return a_first ? std::pair<int, int>{a, b} : std::pair<int, int>{b, a};
}

// ---------------------------------------------------------------------------
// Scene proposal
// ---------------------------------------------------------------------------

struct LabelSet {
    const char* color;
    const char* texture;
    const char* shape;
};

std::vector<LabelSet> pick_labels(std::mt19937_64& rng, int n) {
    static const char* colors[] = {"gray", "red", "blue", "green", "brown", "purple", "cyan", "yellow"};
    static const char* textures[] = {"rubber", "metal"};
    static const char* shapes[] = {"sphere", "cube", "cylinder"};
    std::vector<int> combo(48);
    std::iota(combo.begin(), combo.end(), 0);
    for (int i = static_cast<int>(combo.size()) - 1; i > 0; --i) {
        std::swap(combo[static_cast<std::size_t>(i)],
                  combo[static_cast<std::size_t>(rng() % static_cast<std::uint64_t>(i + 1))]);
    }
    std::vector<LabelSet> out;
    for (int k = 0; k < n; ++k) {
        const int c = combo[static_cast<std::size_t>(k)];
        out.push_back({colors[c % 8], textures[(c / 8) % 2], shapes[c / 16]});
    }
    return out;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

SimScene propose(std::mt19937_64& rng, int n, const EngineConfig& cfg) {
    SimScene scene;
    scene.duration_s = cfg.slot_count * cfg.slot_duration_s;
    scene.fps = cfg.frames_per_second;
    const auto labels = pick_labels(rng, n);

    auto add_object = [&](Point3 p, Point3 v) {
        SimObject obj;
        const auto& l = labels[scene.objects.size()];
        obj.color = l.color;
        obj.texture = l.texture;
        obj.shape = l.shape;
        obj.p0 = p;
        obj.v0 = v;
        scene.objects.push_back(obj);
    };

    // Colliding pair: contact point, contact time away from slot
    // boundaries, then a mover-vs-rest or crossing-movers approach.
    const Point3 contact{uniform(rng, -0.3, 0.3), uniform(rng, -0.25, 0.25), kPlaneDepth};
    const bool mover_vs_rest = n < 2 ? true : (rng() % 2 == 0);
    const int contact_slot = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(cfg.slot_count - 2));
    const double phase = mover_vs_rest ? uniform(rng, 0.56, 0.66) : uniform(rng, 0.35, 0.65);
    const double tc = (contact_slot + phase) * cfg.slot_duration_s;
    const double psi = uniform(rng, -M_PI, M_PI);
    const Point3 dir{std::cos(psi), std::sin(psi), 0.0};

    if (n == 1) {
        add_object(contact, rng() % 2 == 0 ? Point3{0.25, 0.1, 0} : Point3{});
        return scene;
    }
    if (mover_vs_rest) {
        const double speed_a = uniform(rng, 0.28, 0.38);
        add_object(contact - dir * (speed_a * tc + contact_distance(cfg)), dir * speed_a);
        add_object(contact, {});
    } else {
        const double speed_a = uniform(rng, 0.2, 0.38);
        const double speed_b = uniform(rng, 0.2, 0.38);
        const double delta = uniform(rng, -0.3, 0.3);
        const Point3 dir_b{std::cos(psi + M_PI + delta), std::sin(psi + M_PI + delta), 0.0};
        add_object(contact - dir * (speed_a * tc), dir * speed_a);
        add_object(contact - dir_b * (speed_b * tc), dir_b * speed_b);
    }

    // Background objects away from the collision corridor. The first
    // two form a flyby (closest approach inside the attended band but
    // outside any touch candidacy) so distance trends get exercised.
    const double flyby_speed = uniform(rng, 0.36, 0.4);
    const double flyby_offset = uniform(rng, 0.072, 0.088);
    const double flyby_tmin = (2 + static_cast<double>(rng() % 2)) * cfg.slot_duration_s;
    for (int k = 2; k < n; ++k) {
        switch (k - 2) {
            case 0:
                add_object({0.25 - flyby_speed * flyby_tmin, 0.78, kPlaneDepth}, {flyby_speed, 0.0, 0.0});
                break;
            case 1:
                add_object({0.25, 0.78 - flyby_offset, kPlaneDepth}, {});
                break;
            default:
                add_object({1.3 - uniform(rng, 0.0, 0.06), -0.8 - uniform(rng, 0.0, 0.1), kPlaneDepth},
                           {-uniform(rng, 0.3, 0.38), 0.0, 0.0});
                break;
        }
    }
    return scene;
}

// ---------------------------------------------------------------------------
// Margin policy
// ---------------------------------------------------------------------------

bool within_margins(const SimScene& scene, const EngineConfig& cfg) {
    // Pairs below 3x touch_thd risk box-overlap candidacy at the
    // rendered box size; flybys must sit between that and the touch
    // band, clear of the attention gate.
    const double rest_ceiling = 0.5 * cfg.move_thd;       // quantities classified rest
    const double move_floor = 1.6 * cfg.move_thd;         // quantities classified move
    const double contact_ceiling = 0.75 * cfg.touch_thd;  // contact-slot sampled minimum
    const double near_floor = 3.0 * cfg.touch_thd;        // event pair outside the contact slot
    const double flyby_floor = 1.6 * cfg.touch_thd;
    const double flyby_ceiling = 2.25 * cfg.touch_thd;
    const double attention_margin = 0.08 * cfg.dist_att_thd;
    const double amplitude_margin = 0.4 * cfg.distance_amplitude_thd;
    const double robust_turn_deg = cfg.direction_change_angle_thd + 10.0;

    const int n = static_cast<int>(scene.objects.size());
    const FrameGrid grid = evaluate_grid(scene);
    const auto slots = grid_slots(grid.frame_count, cfg);

    auto clear_of_move_thd = [&](double d) { return d <= rest_ceiling || d >= move_floor; };

    // Bounds and per-segment speeds.
    for (int i = 0; i < n; ++i) {
        for (int f = grid.first_frame[static_cast<std::size_t>(i)]; f < grid.frame_count; ++f) {
            const Point3& p = grid.pos[static_cast<std::size_t>(i)][static_cast<std::size_t>(f)];
            if (std::abs(p.x) > kBoundX || std::abs(p.y) > kBoundY) return false;
        }
        std::vector<double> times{0.0};
        for (const auto& ev : scene.events) {
            if (ev.a == i || ev.b == i) times.push_back(ev.time_s + 1e-6);
        }
        for (double t : times) {
            const double speed = scene.velocity_at(i, t).norm();
            if (!(speed <= rest_ceiling || (speed >= 0.12 && speed <= 0.45))) return false;
        }
    }

    // Events: one per object, away from video ends and slot boundaries,
    // moderate closing speed, and a robustly confirmable motion change.
    std::vector<int> involved(static_cast<std::size_t>(n), 0);
    for (const auto& ev : scene.events) {
        ++involved[static_cast<std::size_t>(ev.a)];
        ++involved[static_cast<std::size_t>(ev.b)];
        if (ev.time_s < 0.4 || ev.time_s > scene.duration_s - 0.4) return false;
        const double slot_pos = ev.time_s / cfg.slot_duration_s;
        if (std::abs(slot_pos - std::round(slot_pos)) * cfg.slot_duration_s < 0.22) return false;

        const Point3 pa = scene.position_at(ev.a, ev.time_s);
        const Point3 pb = scene.position_at(ev.b, ev.time_s);
        Point3 normal = pa - pb;
        normal = normal * (1.0 / normal.norm());
        const Point3 va_pre = scene.velocity_at(ev.a, ev.time_s - 1e-6);
        const Point3 vb_pre = scene.velocity_at(ev.b, ev.time_s - 1e-6);
        const double closing = std::abs((va_pre - vb_pre).dot(normal));
        if (closing < 0.18 || closing > 0.8) return false;

        // Confirmation margin in the contact slot.
        const int slot_index = std::min(static_cast<int>(ev.time_s / cfg.slot_duration_s),
                                        static_cast<int>(slots.size()) - 1);
        const GridSlot& slot = slots[static_cast<std::size_t>(slot_index)];
        const auto series = grid_pair_series(grid, ev.a, ev.b, slot);
        if (series.empty()) return false;
        const int closest = series.closest_frame();
        bool confirmed = false;
        for (int obj : {ev.a, ev.b}) {
            const GridKinematics kin = grid_kinematics(grid, obj, slot, cfg);
            if (kin.available && kin.has_halves && kin.disp_full >= move_floor &&
                kin.disp_first <= rest_ceiling && kin.disp_second >= move_floor) {
                confirmed = true;
            }
            const GridTurn turn = grid_turn(grid, obj, slot, closest, cfg);
            if (turn.windows_ok && turn.disp_pre >= move_floor && turn.disp_post >= move_floor &&
                std::abs(turn.angle) >= robust_turn_deg) {
                confirmed = true;
            }
        }
        if (!confirmed) return false;
    }
    for (int i = 0; i < n; ++i) {
        if (involved[static_cast<std::size_t>(i)] > 1) return false;
    }

    // Kinematic quantities clear of move_thd in every slot.
    for (int i = 0; i < n; ++i) {
        for (const auto& slot : slots) {
            const GridKinematics kin = grid_kinematics(grid, i, slot, cfg);
            if (!kin.available) continue;
            if (!clear_of_move_thd(kin.disp_full)) return false;
            if (kin.has_halves &&
                (!clear_of_move_thd(kin.disp_first) || !clear_of_move_thd(kin.disp_second))) {
                return false;
            }
        }
    }

    // Pair separations and smoothed-distance gates.
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            const SimEvent* event = nullptr;
            for (const auto& ev : scene.events) {
                if ((ev.a == a && ev.b == b) || (ev.a == b && ev.b == a)) event = &ev;
            }
            for (const auto& slot : slots) {
                const auto series = grid_pair_series(grid, a, b, slot);
                if (series.empty()) continue;
                const double min_d = series.min_value();
                if (event == nullptr) {
                    if (min_d < near_floor && !(min_d >= flyby_floor && min_d <= flyby_ceiling)) {
                        return false;
                    }
                } else {
                    const bool contact_slot = event->frame >= slot.start && event->frame < slot.end;
                    if (contact_slot && min_d > contact_ceiling) return false;
                    if (!contact_slot && min_d < near_floor) return false;
                }
                const GridTrend trend = grid_trend(series, cfg);
                if (trend.series_long_enough) {
                    if (std::abs(trend.min_smoothed - cfg.dist_att_thd) < attention_margin) return false;
                    // Amplitude only gates attended pairs.
                    if (trend.min_smoothed <= cfg.dist_att_thd &&
                        std::abs(trend.amplitude - cfg.distance_amplitude_thd) < amplitude_margin) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

// Template scene used when no random proposal qualifies for a seed:
// a mover stopping a resting target dead-center, margin-safe by
// construction, with parked extras.
SimScene fallback_scene(std::uint64_t seed, int n, const EngineConfig& cfg) {
    SimScene scene;
    scene.seed = seed;
    scene.duration_s = cfg.slot_count * cfg.slot_duration_s;
    scene.fps = cfg.frames_per_second;
    std::mt19937_64 rng(splitmix64(seed ^ 0xFA11BACCULL));
    const auto labels = pick_labels(rng, std::max(n, 1));

    auto add_object = [&](Point3 p, Point3 v) {
        SimObject obj;
        const auto& l = labels[scene.objects.size()];
        obj.color = l.color;
        obj.texture = l.texture;
        obj.shape = l.shape;
        obj.p0 = p;
        obj.v0 = v;
        scene.objects.push_back(obj);
    };

    const double jitter = (static_cast<double>((seed >> 8) % 11) - 5.0) * 0.001;
    const double speed = 0.3;
    const double tc = (std::min(2, cfg.slot_count - 1) + 0.54) * cfg.slot_duration_s;
    const Point3 contact{0.05, jitter, kPlaneDepth};
    const Point3 dir{1.0, 0.0, 0.0};
    if (n == 1) {
        add_object(contact, {});
        return scene;
    }
    add_object(contact - dir * (speed * tc + contact_distance(cfg)), dir * speed);
    add_object(contact, {});
    if (n >= 3) add_object({-1.25, 0.8 + jitter, kPlaneDepth}, {0.35, 0.0, 0.0});
    if (n >= 4) add_object({1.2, -0.95, kPlaneDepth}, {});
    if (n >= 5) add_object({-1.2, -0.95, kPlaneDepth}, {});
    sweep_collisions(scene, cfg);
    return scene;
}

} // namespace

bool scene_within_margins(const SimScene& scene, const EngineConfig& cfg) {
    return within_margins(scene, cfg);
}

SimScene generate(std::uint64_t seed, int n_objects, const EngineConfig& cfg) {
    if (n_objects < 1) throw ValidationError("generate: n_objects must be >= 1");
    for (std::uint64_t attempt = 0; attempt < 400; ++attempt) {
        std::mt19937_64 rng(splitmix64(seed * 0x9E3779B97F4A7C15ULL + attempt));
        SimScene scene = propose(rng, n_objects, cfg);
        scene.seed = seed;
        if (!sweep_collisions(scene, cfg)) continue;
        if (n_objects >= 2) {
            // The intended pair must collide exactly once, nothing else.
            if (scene.events.size() != 1) continue;
            const auto& ev = scene.events.front();
            if (!((ev.a == 0 && ev.b == 1) || (ev.a == 1 && ev.b == 0))) continue;
        } else if (!scene.events.empty()) {
            continue;
        }
        if (within_margins(scene, cfg)) return scene;
    }
    return fallback_scene(seed, n_objects, cfg);
}

json render_observations(const SimScene& scene, double noise_sigma, const EngineConfig& cfg) {
    if (noise_sigma < 0.0) throw ValidationError("render_observations: noise_sigma must be >= 0");
    const CameraIntrinsics k{cfg.focal_length, kImageWidth / 2.0, kImageHeight / 2.0};
    std::mt19937_64 rng(splitmix64(scene.seed ^ 0x0B5E67A710255EEDULL));
    std::normal_distribution<double> gauss(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);

    auto anchor_rgb = [&](const std::string& name) {
        for (const auto& anchor : cfg.palette) {
            if (anchor.name == name) return anchor.rgb;
        }
        return std::array<double, 3>{128.0, 128.0, 128.0};
    };

    json frames = json::array();
    const int frame_count = scene.frame_count();
    for (int f = 0; f < frame_count; ++f) {
        const double t = f / scene.fps;
        json dets = json::array();
        for (std::size_t i = 0; i < scene.objects.size(); ++i) {
            const auto& obj = scene.objects[i];
            if (f < obj.start_frame) continue;
            Point3 center = scene.position_at(static_cast<int>(i), t);
            if (noise_sigma > 0.0) {
                center.x += gauss(rng);
                center.y += gauss(rng);
                center.z += gauss(rng);
            }
            const Pixel px = project(center, k);
            const json box = {px.u - kBoxSidePx / 2, px.v - kBoxSidePx / 2, px.u + kBoxSidePx / 2,
                              px.v + kBoxSidePx / 2};
            const auto rgb = anchor_rgb(obj.color);
            dets.push_back({{"kind", "shape"},
                            {"label", obj.shape},
                            {"confidence", kDetectionConfidence},
                            {"box", box},
                            {"mean_rgb", {rgb[0], rgb[1], rgb[2]}},
                            {"center_3d", {center.x, center.y, center.z}}});
            dets.push_back({{"kind", "texture"},
                            {"label", obj.texture},
                            {"confidence", kDetectionConfidence},
                            {"box", box},
                            {"mean_rgb", {rgb[0], rgb[1], rgb[2]}}});
        }
        frames.push_back({{"index", f}, {"detections", dets}});
    }

    return json{{"video_id", "sim_" + std::to_string(scene.seed) + "_" + std::to_string(scene.objects.size())},
                {"fps", scene.fps},
                {"width", kImageWidth},
                {"height", kImageHeight},
                {"intrinsics", {{"f", k.f}, {"cx", k.cx}, {"cy", k.cy}}},
                {"scene_seed", scene.seed},
                {"frames", frames}};
}

std::vector<SlotEvents> oracle_relations(const SimScene& scene, const EngineConfig& cfg) {
    const FrameGrid grid = evaluate_grid(scene);
    const auto slots = grid_slots(grid.frame_count, cfg);
    const int n = static_cast<int>(scene.objects.size());

    std::vector<SlotEvents> result;
    for (const auto& slot : slots) {
        SlotEvents out;
        out.slot = {slot.index, slot.start, slot.end};

        for (int i = 0; i < n; ++i) {
            const GridKinematics kin = grid_kinematics(grid, i, slot, cfg);
            if (!kin.available) continue;
            RelationEvent event;
            event.slot_index = slot.index;
            event.kind = kin.kind;
            event.participants = {i};
            out.events.push_back(event);
        }

        struct Hit {
            int a, b, frame;
        };
        std::vector<Hit> hits;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const auto series = grid_pair_series(grid, a, b, slot);
                if (series.empty() || !(series.min_value() < cfg.touch_thd)) continue;
                const int closest = series.closest_frame();
                bool confirmed = false;
                for (int obj : {a, b}) {
                    const GridTurn turn = grid_turn(grid, obj, slot, closest, cfg);
                    if (turn.windows_ok && std::abs(turn.angle) > cfg.direction_change_angle_thd) {
                        confirmed = true;
                    }
                    const GridKinematics kin = grid_kinematics(grid, obj, slot, cfg);
                    if (kin.available && kin.kind == RelationKind::RestFirstThenMove) confirmed = true;
                }
                if (!confirmed) continue;
                bool isolated = true;
                for (int c = 0; c < n && isolated; ++c) {
                    if (c == a || c == b) continue;
                    for (int obj : {a, b}) {
                        const auto other = grid_pair_series(grid, c, obj, slot);
                        if (!other.empty() && other.min_value() < cfg.touch_thd) isolated = false;
                    }
                }
                if (!isolated) continue;
                hits.push_back({a, b, closest});
                RelationEvent event;
                event.slot_index = slot.index;
                event.kind = RelationKind::Touch;
                const auto [first, second] = grid_mover_first(grid, a, b, slot, cfg);
                event.participants = {first, second};
                out.events.push_back(event);
            }
        }
        for (const auto& hit : hits) {
            for (int obj : {hit.a, hit.b}) {
                const GridTurn turn = grid_turn(grid, obj, slot, hit.frame, cfg);
                if (!turn.windows_ok || std::abs(turn.angle) <= cfg.direction_change_angle_thd) continue;
                RelationEvent event;
                event.slot_index = slot.index;
                event.kind = RelationKind::ChangeDirection;
                event.participants = {obj};
                event.direction_label = grid_direction_label(turn.angle);
                out.events.push_back(event);
            }
        }

        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const auto series = grid_pair_series(grid, a, b, slot);
                const GridTrend trend = grid_trend(series, cfg);
                if (!trend.series_long_enough) continue;
                if (trend.min_smoothed > cfg.dist_att_thd) continue;
                if (!(trend.amplitude > cfg.distance_amplitude_thd)) continue;
                if (trend.sign_changes > 1) continue;
                RelationEvent event;
                event.slot_index = slot.index;
                const auto [first, second] = grid_mover_first(grid, a, b, slot, cfg);
                event.participants = {first, second};
                if (trend.sign_changes == 0) {
                    event.kind = trend.first_sign < 0 ? RelationKind::GoCloser : RelationKind::GoFarther;
                } else {
                    event.kind = trend.first_sign < 0 ? RelationKind::GoCloserThenFarther
                                                      : RelationKind::GoFartherThenCloser;
                }
                out.events.push_back(event);
            }
        }

        std::sort(out.events.begin(), out.events.end(), canonical_event_less);
        out.events.erase(std::unique(out.events.begin(), out.events.end()), out.events.end());
        result.push_back(std::move(out));
    }
    return result;
}

json scene_to_json(const SimScene& scene) {
    json objects = json::array();
    for (const auto& o : scene.objects) {
        objects.push_back({{"color", o.color},
                           {"texture", o.texture},
                           {"shape", o.shape},
                           {"p0", {o.p0.x, o.p0.y, o.p0.z}},
                           {"v0", {o.v0.x, o.v0.y, o.v0.z}},
                           {"start_frame", o.start_frame}});
    }
    json events = json::array();
    for (const auto& ev : scene.events) {
        events.push_back({{"time_s", ev.time_s},
                          {"frame", ev.frame},
                          {"a", ev.a},
                          {"b", ev.b},
                          {"va_post", {ev.va_post.x, ev.va_post.y, ev.va_post.z}},
                          {"vb_post", {ev.vb_post.x, ev.vb_post.y, ev.vb_post.z}}});
    }
    return json{{"seed", scene.seed}, {"duration_s", scene.duration_s}, {"fps", scene.fps},
                {"objects", objects}, {"events", events}};
}

namespace {

Point3 point_from_json(const json& v, const char* ctx) {
    if (!v.is_array() || v.size() != 3) throw SchemaError(std::string(ctx) + ": expected [x,y,z]");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

} // namespace

SimScene scene_from_json(const json& doc) {
    SimScene scene;
    try {
        scene.seed = doc.at("seed").get<std::uint64_t>();
        scene.duration_s = doc.at("duration_s").get<double>();
        scene.fps = doc.at("fps").get<double>();
        for (const auto& o : doc.at("objects")) {
            SimObject obj;
            obj.color = o.at("color").get<std::string>();
            obj.texture = o.at("texture").get<std::string>();
            obj.shape = o.at("shape").get<std::string>();
            obj.p0 = point_from_json(o.at("p0"), "scene object");
            obj.v0 = point_from_json(o.at("v0"), "scene object");
            obj.start_frame = o.at("start_frame").get<int>();
            scene.objects.push_back(std::move(obj));
        }
        for (const auto& e : doc.at("events")) {
            SimEvent ev;
            ev.time_s = e.at("time_s").get<double>();
            ev.frame = e.at("frame").get<int>();
            ev.a = e.at("a").get<int>();
            ev.b = e.at("b").get<int>();
            ev.va_post = point_from_json(e.at("va_post"), "scene event");
            ev.vb_post = point_from_json(e.at("vb_post"), "scene event");
            scene.events.push_back(ev);
        }
    } catch (const json::exception& e) {
        throw SchemaError(std::string("scene document: ") + e.what());
    }
    return scene;
}

} // namespace srnn
