#include "srnn/network.hpp"

#include <algorithm>
#include <random>

#include <nlohmann/json.hpp>

namespace srnn {

using nlohmann::json;

namespace {

constexpr std::array<const char*, 9> kNeuronKindNames = {
    "nature",       "entity_instance", "concept_instance", "action_instance", "action_stamp",
    "subaction_stamp", "entity_stamp", "time_stamp",       "lexical",
};

const char* kDirectionNames[] = {"front-right", "right", "back-right", "back",
                                 "back-left",   "left",  "front-left"};

} // namespace

const char* neuron_kind_name(NeuronKind kind) { return kNeuronKindNames[static_cast<int>(kind)]; }

std::optional<NeuronKind> neuron_kind_from_name(const std::string& name) {
    for (std::size_t i = 0; i < kNeuronKindNames.size(); ++i) {
        if (name == kNeuronKindNames[i]) return static_cast<NeuronKind>(i);
    }
    return std::nullopt;
}

int NeuronGraph::add_neuron(const std::string& name, NeuronKind kind, double threshold,
                            bool active_on_create) {
    if (by_name_.count(name) != 0) throw Error("duplicate neuron name: " + name);
    Neuron n;
    n.id = static_cast<int>(neurons_.size());
    n.name = name;
    n.kind = kind;
    n.threshold = threshold;
    n.active = active_on_create;
    n.ever_active = active_on_create;
    neurons_.push_back(n);
    out_.emplace_back();
    in_.emplace_back();
    by_name_[name] = n.id;
    creation_log_.push_back({slot_cursor_, false, n.id, -1});
    return n.id;
}

bool NeuronGraph::add_edge(int from, int to) {
    if (from == to) return false;
    if (!edge_set_.insert({from, to}).second) return false;
    edges_.push_back({from, to});
    out_[static_cast<std::size_t>(from)].push_back(to);
    in_[static_cast<std::size_t>(to)].push_back(from);
    creation_log_.push_back({slot_cursor_, true, from, to});
    return true;
}

int NeuronGraph::find(const std::string& name) const {
    const auto it = by_name_.find(name);
    if (it == by_name_.end()) return -1;
    return neurons_[static_cast<std::size_t>(it->second)].removed ? -1 : it->second;
}

void NeuronGraph::stimulate(int id, double value) {
    neurons_[static_cast<std::size_t>(id)].accumulated += value;
}

void NeuronGraph::send(int from, double value) {
    for (int to : out_[static_cast<std::size_t>(from)]) {
        neurons_[static_cast<std::size_t>(to)].accumulated += value;
    }
}

void NeuronGraph::step_activation(Diagnostics* diag) {
    const std::size_t bound = neurons_.size();
    for (std::size_t round = 0; round <= bound; ++round) {
        std::vector<int> fired;
        for (auto& n : neurons_) {
            if (n.removed || n.active || n.accumulated < n.threshold) continue;
            n.active = true;
            n.ever_active = true;
            fired.push_back(n.id);
        }
        if (fired.empty()) return;
        if (round == bound) break; // the scaffolding is acyclic; this trips only on corrupt graphs
        for (int id : fired) send(id, 1.0);
    }
    if (diag) ++diag->cycle_guard_trips;
}

void NeuronGraph::begin_slot(int slot_index) {
    if (slot_index != slot_cursor_ + 1) {
        throw OutOfOrderSlot("begin_slot: expected slot " + std::to_string(slot_cursor_ + 1) + ", got " +
                             std::to_string(slot_index));
    }
    slot_cursor_ = slot_index;
}

void NeuronGraph::close_slot() {
    for (auto& n : neurons_) {
        n.accumulated = 0.0;
        n.active = false;
    }
}

int NeuronGraph::ensure_entity_instance(int track_id) {
    const std::string name = "ins_entity_" + std::to_string(track_id);
    const int existing = find(name);
    if (existing >= 0) {
        auto& n = neurons_[static_cast<std::size_t>(existing)];
        n.active = true; // participants fire on every observed relation
        n.ever_active = true;
        return existing;
    }
    return add_neuron(name, NeuronKind::EntityInstance, 1.0, true);
}

std::string NeuronGraph::make_name(const char* prefix) const {
    return std::string(prefix) + "_" + std::to_string(next_id());
}

void NeuronGraph::remove_neuron(int id) {
    auto& n = neurons_[static_cast<std::size_t>(id)];
    n.removed = true;
    n.active = false;
    std::vector<Edge> kept;
    kept.reserve(edges_.size());
    for (const auto& e : edges_) {
        if (e.from == id || e.to == id) {
            edge_set_.erase({e.from, e.to});
        } else {
            kept.push_back(e);
        }
    }
    edges_ = std::move(kept);
    for (auto& adj : out_) adj.erase(std::remove(adj.begin(), adj.end(), id), adj.end());
    for (auto& adj : in_) adj.erase(std::remove(adj.begin(), adj.end(), id), adj.end());
    out_[static_cast<std::size_t>(id)].clear();
    in_[static_cast<std::size_t>(id)].clear();
}

void NeuronGraph::remove_edges(const std::set<std::pair<int, int>>& doomed) {
    std::vector<Edge> kept;
    kept.reserve(edges_.size());
    for (const auto& e : edges_) {
        if (doomed.count({e.from, e.to}) != 0) {
            edge_set_.erase({e.from, e.to});
            auto& adj_out = out_[static_cast<std::size_t>(e.from)];
            adj_out.erase(std::remove(adj_out.begin(), adj_out.end(), e.to), adj_out.end());
            auto& adj_in = in_[static_cast<std::size_t>(e.to)];
            adj_in.erase(std::remove(adj_in.begin(), adj_in.end(), e.from), adj_in.end());
        } else {
            kept.push_back(e);
        }
    }
    edges_ = std::move(kept);
}

NeuronGraph load_nature_design(const EngineConfig& cfg) {
    NeuronGraph graph;
    const double base = cfg.neuron_activation_threshold;
    const double joint = 2.0 * base;

    const int action = graph.add_neuron("#action", NeuronKind::Nature, joint, false);
    const char* role_names[] = {"#subject",         "#object",          "#goal",
                                "#source",          "#reserved_role_5", "#reserved_role_6",
                                "#reserved_role_7", "#reserved_role_8"};
    std::vector<int> roles;
    for (const char* name : role_names) roles.push_back(graph.add_neuron(name, NeuronKind::Nature, joint, false));
    const int wernicke = graph.add_neuron("#wernicke", NeuronKind::Nature, base, false);

    std::vector<int> relations;
    for (int k = 0; k <= static_cast<int>(RelationKind::FutureTouch); ++k) {
        relations.push_back(graph.add_neuron(std::string("#") + kind_name(static_cast<RelationKind>(k)),
                                             NeuronKind::Nature, base, false));
    }
    std::vector<int> attrs;
    for (const char* name : kDirectionNames) {
        attrs.push_back(graph.add_neuron(std::string("#") + name, NeuronKind::Nature, joint, false));
    }
    graph.add_neuron("#attr", NeuronKind::Nature, base, false);

    graph.add_edge(wernicke, action);
    for (int role : roles) graph.add_edge(action, role);
    const int subject = roles[0];
    const int object = roles[1];
    const int goal = roles[2];
    for (std::size_t k = 0; k < relations.size(); ++k) {
        const auto kind = static_cast<RelationKind>(k);
        graph.add_edge(relations[k], action);
        graph.add_edge(relations[k], subject);
        if (kind_arity(kind) == 2) {
            graph.add_edge(relations[k], kind == RelationKind::FutureTouch ? goal : object);
        }
    }
    const int change_direction = relations[static_cast<std::size_t>(RelationKind::ChangeDirection)];
    for (int attr : attrs) graph.add_edge(change_direction, attr);
    return graph;
}

int fire_wire_how(NeuronGraph& graph, const RelationEvent& event, Diagnostics* diag) {
    const int rel = graph.find(std::string("#") + kind_name(event.kind));
    if (rel < 0) {
        throw UnknownRelationKind(std::string("fire_wire_how: no nature neuron for kind '") +
                                  kind_name(event.kind) + "'");
    }
    std::vector<int> participants;
    for (int track_id : event.participants) participants.push_back(graph.ensure_entity_instance(track_id));

    // One emission per observed relation instance.
    if (!graph.neuron(rel).active) {
        graph.stimulate(rel, 1.0);
        graph.step_activation(diag);
    } else {
        graph.send(rel, 1.0);
        graph.step_activation(diag);
    }

    const int stamp = graph.add_neuron(graph.make_name("stamp_action"), NeuronKind::ActionStamp, 1.0, true);
    graph.add_edge(rel, stamp);
    for (int participant : participants) graph.add_edge(stamp, participant);

    if (event.kind == RelationKind::ChangeDirection) {
        const int attr = graph.find("#" + event.direction_label);
        if (attr < 0) {
            throw UnknownRelationKind("fire_wire_how: unknown direction label '" + event.direction_label +
                                      "'");
        }
        graph.stimulate(attr, 1.0); // joint with the signal from #change_direction
        graph.step_activation(diag);
        const int concept_id = graph.add_neuron(graph.make_name("ins_concept"), NeuronKind::ConceptInstance,
                                             1.0, true);
        graph.add_edge(attr, concept_id);
        graph.add_edge(stamp, concept_id);
    }
    return stamp;
}

int fire_wire_what(NeuronGraph& graph, const ObjectTrack& track, Diagnostics* diag) {
    const int entity = graph.find("ins_entity_" + std::to_string(track.track_id));
    if (entity < 0) {
        throw Error("fire_wire_what: entity instance missing for track " + std::to_string(track.track_id));
    }
    for (int target : graph.out_edges(entity)) {
        if (graph.neuron(target).kind == NeuronKind::EntityStamp) return target; // already bound
    }

    const int attr = graph.find("#attr");
    const int stamp = graph.add_neuron(graph.make_name("stamp_entity"), NeuronKind::EntityStamp, 1.0, true);
    graph.add_edge(entity, stamp);
    for (const std::string& word : {track.texture_label, track.color_label, track.shape_label}) {
        const int concept_id = graph.add_neuron(graph.make_name("ins_concept"), NeuronKind::ConceptInstance,
                                             1.0, true);
        if (attr >= 0) graph.add_edge(attr, concept_id);
        graph.add_edge(stamp, concept_id);
        const std::string lexical_name = "_" + word;
        int lexical = graph.find(lexical_name);
        if (lexical < 0) lexical = graph.add_neuron(lexical_name, NeuronKind::Lexical, 1.0, false);
        graph.add_edge(concept_id, lexical);
        graph.send(concept_id, 1.0);
        graph.step_activation(diag);
    }
    return stamp;
}

int bind_time(NeuronGraph& graph, int slot_index, const std::vector<int>& action_stamps) {
    if (slot_index != graph.last_bound_slot() + 1 || slot_index != graph.slot_cursor()) {
        throw OutOfOrderSlot("bind_time: slot " + std::to_string(slot_index) + " out of order");
    }
    const int stamp = graph.add_neuron("stamp_time_" + std::to_string(slot_index + 1),
                                       NeuronKind::TimeStamp, 1.0, true);
    if (!graph.time_chain().empty()) graph.add_edge(graph.time_chain().back(), stamp);
    for (int action : action_stamps) graph.add_edge(stamp, action);
    auto chain = graph.time_chain();
    chain.push_back(stamp);
    graph.set_time_chain(std::move(chain));
    graph.set_last_bound_slot(slot_index);
    return stamp;
}

AblationSet AblationSet::parse(const std::vector<std::string>& raw) {
    AblationSet out;
    for (const auto& name : raw) {
        out.names.push_back(name);
        if (name == "rest_state") {
            out.rest_state = true;
        } else if (name == "distance_change") {
            out.kinds.insert({RelationKind::GoCloser, RelationKind::GoFarther,
                              RelationKind::GoFartherThenCloser, RelationKind::GoCloserThenFarther});
        } else if (const auto kind = kind_from_name(name)) {
            out.kinds.insert(*kind);
        } else {
            throw UnknownKind("unknown ablation kind: '" + name + "'");
        }
    }
    return out;
}

void remove_ablated_nature(NeuronGraph& graph, const AblationSet& ablation) {
    for (RelationKind kind : ablation.kinds) {
        const int id = graph.find(std::string("#") + kind_name(kind));
        if (id >= 0) graph.remove_neuron(id);
    }
}

void shuffle_time(NeuronGraph& graph, std::uint64_t seed) {
    auto chain = graph.time_chain();
    if (chain.size() < 2) return;

    std::mt19937_64 rng(seed);
    for (std::size_t i = chain.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(chain[i], chain[j]);
    }

    // Drop the old chain edges, then relink in the shuffled order.
    const auto& old_chain = graph.time_chain();
    std::set<std::pair<int, int>> old_edges;
    for (std::size_t i = 0; i + 1 < old_chain.size(); ++i) old_edges.insert({old_chain[i], old_chain[i + 1]});
    graph.remove_edges(old_edges);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) graph.add_edge(chain[i], chain[i + 1]);
    graph.set_time_chain(std::move(chain));
}

namespace {

json neuron_to_json(const Neuron& n) {
    return {{"id", n.id},
            {"name", n.name},
            {"kind", neuron_kind_name(n.kind)},
            {"threshold", n.threshold},
            {"active", n.ever_active}};
}

} // namespace

json graph_to_json(const NeuronGraph& graph) {
    json neurons = json::array();
    for (const auto& n : graph.neurons()) {
        if (!n.removed) neurons.push_back(neuron_to_json(n));
    }
    json edges = json::array();
    for (const auto& e : graph.edges()) edges.push_back({e.from, e.to});
    json log = json::array();
    for (const auto& r : graph.creation_log()) {
        if (r.is_edge) {
            log.push_back({{"slot", r.slot}, {"type", "edge"}, {"from", r.id}, {"to", r.to}});
        } else {
            log.push_back({{"slot", r.slot}, {"type", "neuron"}, {"id", r.id}});
        }
    }
    return {{"slot_cursor", graph.slot_cursor()},
            {"last_bound_slot", graph.last_bound_slot()},
            {"neurons", neurons},
            {"edges", edges},
            {"creation_log", log},
            {"time_chain", graph.time_chain()}};
}

NeuronGraph graph_from_json(const json& doc) {
    NeuronGraph graph;
    try {
        int expected = 0;
        for (const auto& jn : doc.at("neurons")) {
            const int id = jn.at("id").get<int>();
            // Ablated ids are absent; fill the gap so ids stay stable.
            while (expected < id) {
                graph.add_neuron("__removed_" + std::to_string(expected), NeuronKind::Nature, 1.0, false);
                graph.remove_neuron(expected);
                ++expected;
            }
            const auto kind = neuron_kind_from_name(jn.at("kind").get<std::string>());
            if (!kind) throw SchemaError("graph: unknown neuron kind");
            const int created = graph.add_neuron(jn.at("name").get<std::string>(), *kind,
                                                 jn.at("threshold").get<double>(), false);
            graph.set_ever_active(created, jn.at("active").get<bool>());
            ++expected;
        }
        for (const auto& je : doc.at("edges")) graph.add_edge(je.at(0).get<int>(), je.at(1).get<int>());
        graph.set_time_chain(doc.at("time_chain").get<std::vector<int>>());
        graph.set_slot_cursor(doc.at("slot_cursor").get<int>());
        graph.set_last_bound_slot(doc.at("last_bound_slot").get<int>());
        std::vector<CreationRecord> log;
        for (const auto& jr : doc.at("creation_log")) {
            CreationRecord r;
            r.slot = jr.at("slot").get<int>();
            r.is_edge = jr.at("type").get<std::string>() == "edge";
            if (r.is_edge) {
                r.id = jr.at("from").get<int>();
                r.to = jr.at("to").get<int>();
            } else {
                r.id = jr.at("id").get<int>();
            }
            log.push_back(r);
        }
        graph.set_creation_log(std::move(log));
    } catch (const json::exception& e) {
        throw SchemaError(std::string("graph document: ") + e.what());
    }
    return graph;
}

std::string graph_to_dot(const NeuronGraph& graph) {
    auto color = [](NeuronKind kind) {
        switch (kind) {
            case NeuronKind::Nature:
                return "red";
            case NeuronKind::TimeStamp:
                return "purple";
            case NeuronKind::ActionStamp:
            case NeuronKind::SubactionStamp:
            case NeuronKind::EntityStamp:
                return "gray";
            case NeuronKind::Lexical:
                return "yellow";
            default:
                return "green";
        }
    };
    std::string out = "digraph srnn {\n  node [style=filled];\n";
    std::vector<bool> shown(graph.neurons().size(), false);
    for (const auto& n : graph.neurons()) {
        if (n.removed || !n.ever_active) continue; // inactive neurons omitted
        shown[static_cast<std::size_t>(n.id)] = true;
        out += "  \"" + n.name + "\" [fillcolor=" + color(n.kind) + "];\n";
    }
    for (const auto& e : graph.edges()) {
        if (!shown[static_cast<std::size_t>(e.from)] || !shown[static_cast<std::size_t>(e.to)]) continue;
        out += "  \"" + graph.neuron(e.from).name + "\" -> \"" + graph.neuron(e.to).name + "\";\n";
    }
    out += "}\n";
    return out;
}

std::optional<RelationKind> action_stamp_kind(const NeuronGraph& graph, int stamp_id) {
    for (int from : graph.in_edges(stamp_id)) {
        const Neuron& n = graph.neuron(from);
        if (n.kind != NeuronKind::Nature || n.name.empty() || n.name[0] != '#') continue;
        if (const auto kind = kind_from_name(n.name.substr(1))) return kind;
    }
    return std::nullopt;
}

int time_stamp_slot(const NeuronGraph& graph, int time_stamp_id) {
    const std::string& name = graph.neuron(time_stamp_id).name;
    const auto pos = name.rfind('_');
    return std::stoi(name.substr(pos + 1)) - 1;
}

GraphCheck check_graph_invariants(const NeuronGraph& graph) {
    GraphCheck check;
    auto fail = [&](const std::string& what) { check.violations.push_back(what); };

    std::set<std::pair<int, int>> seen;
    for (const auto& e : graph.edges()) {
        if (e.from == e.to) fail("self loop on neuron " + std::to_string(e.from));
        if (!seen.insert({e.from, e.to}).second) {
            fail("duplicate edge " + std::to_string(e.from) + "->" + std::to_string(e.to));
        }
    }
    for (const auto& n : graph.neurons()) {
        if (!n.removed && n.accumulated < 0.0) fail("negative accumulator on " + n.name);
    }

    // Time stamps: the chain must be a simple path over all of them,
    // one per slot, with no stray time->time edges.
    const auto& chain = graph.time_chain();
    std::set<int> chain_set(chain.begin(), chain.end());
    if (chain_set.size() != chain.size()) fail("time chain revisits a node");
    std::size_t time_count = 0;
    std::set<int> slots_seen;
    for (const auto& n : graph.neurons()) {
        if (n.removed || n.kind != NeuronKind::TimeStamp) continue;
        ++time_count;
        if (chain_set.count(n.id) == 0) fail("time stamp " + n.name + " missing from chain");
        if (!slots_seen.insert(time_stamp_slot(graph, n.id)).second) {
            fail("more than one time stamp for slot of " + n.name);
        }
    }
    if (time_count != chain.size()) fail("time chain length differs from time stamp count");
    std::set<std::pair<int, int>> chain_edges;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
        chain_edges.insert({chain[i], chain[i + 1]});
        if (seen.count({chain[i], chain[i + 1]}) == 0) {
            fail("missing chain edge " + graph.neuron(chain[i]).name + "->" +
                 graph.neuron(chain[i + 1]).name);
        }
    }
    for (const auto& e : graph.edges()) {
        if (graph.neuron(e.from).kind == NeuronKind::TimeStamp &&
            graph.neuron(e.to).kind == NeuronKind::TimeStamp && chain_edges.count({e.from, e.to}) == 0) {
            fail("stray time->time edge " + graph.neuron(e.from).name + "->" + graph.neuron(e.to).name);
        }
    }

    for (const auto& n : graph.neurons()) {
        if (n.removed) continue;
        if (n.kind == NeuronKind::ActionStamp) {
            int time_in = 0;
            for (int from : graph.in_edges(n.id)) {
                if (graph.neuron(from).kind == NeuronKind::TimeStamp) ++time_in;
            }
            if (time_in != 1) fail("action stamp " + n.name + " has " + std::to_string(time_in) +
                                   " incoming time edges");
            const auto kind = action_stamp_kind(graph, n.id);
            if (!kind) {
                fail("action stamp " + n.name + " has no relation edge");
            } else {
                int entities = 0;
                for (int to : graph.out_edges(n.id)) {
                    if (graph.neuron(to).kind == NeuronKind::EntityInstance) ++entities;
                }
                if (entities != kind_arity(*kind)) {
                    fail("action stamp " + n.name + " binds " + std::to_string(entities) +
                         " entities, expected " + std::to_string(kind_arity(*kind)));
                }
            }
        }
        if (n.kind == NeuronKind::SubactionStamp) {
            int role = 0, entity = 0;
            for (int to : graph.out_edges(n.id)) {
                if (graph.neuron(to).kind == NeuronKind::Nature) ++role;
                if (graph.neuron(to).kind == NeuronKind::EntityInstance) ++entity;
            }
            if (role != 1 || entity != 1) fail("subaction stamp " + n.name + " malformed");
        }
    }
    return check;
}

} // namespace srnn
