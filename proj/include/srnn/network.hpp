#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "srnn/config.hpp"
#include "srnn/errors.hpp"
#include "srnn/ingest.hpp"
#include "srnn/relations.hpp"

namespace srnn {

enum class NeuronKind {
    Nature,
    EntityInstance,
    ConceptInstance,
    ActionInstance,
    ActionStamp,
    SubactionStamp,
    EntityStamp,
    TimeStamp,
    Lexical,
};

const char* neuron_kind_name(NeuronKind kind);
std::optional<NeuronKind> neuron_kind_from_name(const std::string& name);

struct Neuron {
    int id = 0;
    std::string name;
    NeuronKind kind = NeuronKind::Nature;
    double threshold = 1.0;
    double accumulated = 0.0; // resets at slot close
    bool active = false;      // per-slot state
    bool ever_active = false; // rendering state, survives slot close
    bool removed = false;     // tombstone left by ablation
};

struct Edge {
    int from = 0;
    int to = 0;
};

struct CreationRecord {
    int slot = -1; // -1 for the predefined scaffolding
    bool is_edge = false;
    int id = -1;   // neuron id, or edge "from"
    int to = -1;   // edge target, -1 for neurons
};

// Directed graph of typed neurons with signal accumulation. Edges are
// deduplicated, self-loops rejected, and ids issued in creation order.
class NeuronGraph {
public:
    int add_neuron(const std::string& name, NeuronKind kind, double threshold, bool active_on_create);
    bool add_edge(int from, int to);

    int find(const std::string& name) const; // -1 when absent
    const Neuron& neuron(int id) const { return neurons_[static_cast<std::size_t>(id)]; }
    int next_id() const { return static_cast<int>(neurons_.size()); }
    const std::vector<Neuron>& neurons() const { return neurons_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<CreationRecord>& creation_log() const { return creation_log_; }
    const std::vector<int>& out_edges(int id) const { return out_[static_cast<std::size_t>(id)]; }
    const std::vector<int>& in_edges(int id) const { return in_[static_cast<std::size_t>(id)]; }

    // External perception input: accumulates signal on one neuron.
    void stimulate(int id, double value = 1.0);
    // Emits one signal of the given value along every outgoing edge.
    void send(int from, double value = 1.0);
    // Activates every neuron whose accumulated input reached its
    // threshold; newly active neurons emit once, cascading to a
    // fixpoint. Propagation is bounded by the neuron count; exceeding
    // the bound trips the cycle guard diagnostic.
    void step_activation(Diagnostics* diag = nullptr);

    void begin_slot(int slot_index); // throws OutOfOrderSlot
    void close_slot();               // resets accumulators and per-slot activity
    int slot_cursor() const { return slot_cursor_; }

    // Entity instance for a track, created and activated on first use.
    int ensure_entity_instance(int track_id);
    std::string make_name(const char* prefix) const;

    const std::vector<int>& time_chain() const { return time_chain_; }
    void set_time_chain(std::vector<int> chain) { time_chain_ = std::move(chain); }
    int last_bound_slot() const { return last_bound_slot_; }
    void set_last_bound_slot(int slot) { last_bound_slot_ = slot; }

    void remove_neuron(int id); // tombstone + drop incident edges
    void remove_edges(const std::set<std::pair<int, int>>& doomed);
    void set_creation_log(std::vector<CreationRecord> log) { creation_log_ = std::move(log); }
    void set_ever_active(int id, bool value) { neurons_[static_cast<std::size_t>(id)].ever_active = value; }
    void set_slot_cursor(int slot) { slot_cursor_ = slot; }

private:
    std::vector<Neuron> neurons_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> out_; // adjacency in edge-creation order
    std::vector<std::vector<int>> in_;
    std::set<std::pair<int, int>> edge_set_;
    std::unordered_map<std::string, int> by_name_;
    std::vector<CreationRecord> creation_log_;
    std::vector<int> time_chain_;
    int slot_cursor_ = -1;
    int last_bound_slot_ = -1;
};

// The predefined scaffolding: relation and kinematic nature neurons,
// the seven direction attribute neurons, #attr, #action with its eight
// semantic roles, and #wernicke, all inactive. Neurons that require
// joint signals (#action, the roles, the direction attributes) carry
// twice the base threshold.
NeuronGraph load_nature_design(const EngineConfig& cfg);

// How pathway: activates the relation nature neuron, creates entity
// instances for the participants on first appearance, and wires a
// fresh action stamp to all of them. Direction changes additionally
// activate the matching attribute neuron and bind a concept instance.
// Returns the action stamp id.
int fire_wire_how(NeuronGraph& graph, const RelationEvent& event, Diagnostics* diag = nullptr);

// What pathway: binds texture/color/shape concept instances of the
// track's entity with a fresh entity stamp and wires their lexical
// neurons. Idempotent per track. Returns the entity stamp id.
int fire_wire_what(NeuronGraph& graph, const ObjectTrack& track, Diagnostics* diag = nullptr);

// Temporal binding: one time stamp per slot, chained to the previous
// one and wired to every action stamp of the slot.
int bind_time(NeuronGraph& graph, int slot_index, const std::vector<int>& action_stamps);

// Relation kinds (plus groups) stripped before processing.
struct AblationSet {
    std::set<RelationKind> kinds;
    bool rest_state = false;
    std::vector<std::string> names; // as given, for the manifest

    // Accepts any relation kind name, the group names "distance_change"
    // (all four trends) and "direction_change", and "rest_state".
    // Throws UnknownKind otherwise.
    static AblationSet parse(const std::vector<std::string>& raw);
    bool contains(RelationKind kind) const { return kinds.count(kind) != 0; }
    bool empty() const { return kinds.empty() && !rest_state; }
};

void remove_ablated_nature(NeuronGraph& graph, const AblationSet& ablation);

// Relinks the time-stamp chain in a seeded random permutation;
// stamp membership is untouched.
void shuffle_time(NeuronGraph& graph, std::uint64_t seed);

nlohmann::json graph_to_json(const NeuronGraph& graph);
NeuronGraph graph_from_json(const nlohmann::json& doc);

// DOT export with the rendering legend: nature red, stamps gray, time
// purple, instances green, lexical yellow. Never-activated neurons are
// omitted.
std::string graph_to_dot(const NeuronGraph& graph);

struct GraphCheck {
    std::vector<std::string> violations;
    bool ok() const { return violations.empty(); }
};

// Structural invariants: a single simple time-stamp path, one incoming
// time edge and relation-arity entity edges per action stamp, and
// well-formed subaction stamps.
GraphCheck check_graph_invariants(const NeuronGraph& graph);

// Relation kind an action stamp was fired for, from its incoming
// nature edge.
std::optional<RelationKind> action_stamp_kind(const NeuronGraph& graph, int stamp_id);

// Slot index recorded in a time stamp's name.
int time_stamp_slot(const NeuronGraph& graph, int time_stamp_id);

} // namespace srnn
