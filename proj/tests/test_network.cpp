#include <doctest.h>

#include <nlohmann/json.hpp>

#include "srnn/network.hpp"

using namespace srnn;

namespace {

RelationEvent touch_event(int slot, int a, int b) {
    RelationEvent event;
    event.slot_index = slot;
    event.kind = RelationKind::Touch;
    event.participants = {a, b};
    return event;
}

ObjectTrack labeled_track(int id, const std::string& color, const std::string& texture,
                          const std::string& shape) {
    ObjectTrack track;
    track.track_id = id;
    track.color_label = color;
    track.texture_label = texture;
    track.shape_label = shape;
    return track;
}

} // namespace

TEST_CASE("nature design loads deterministically with all neurons inactive") {
    const EngineConfig cfg;
    const NeuronGraph a = load_nature_design(cfg);
    const NeuronGraph b = load_nature_design(cfg);
    REQUIRE(a.neurons().size() == b.neurons().size());
    for (std::size_t i = 0; i < a.neurons().size(); ++i) {
        CHECK(a.neurons()[i].name == b.neurons()[i].name);
        CHECK(!a.neurons()[i].active);
    }
    CHECK(a.find("#touch") >= 0);
    CHECK(a.find("#attr") >= 0);
    CHECK(a.find("#wernicke") >= 0);
    CHECK(a.find("#right") >= 0);
    CHECK(a.find("#reserved_role_8") >= 0);
}

TEST_CASE("no edges run between two relation nature neurons") {
    const NeuronGraph graph = load_nature_design(EngineConfig{});
    auto is_relation = [&](int id) {
        const auto& name = graph.neuron(id).name;
        return name.size() > 1 && name[0] == '#' && kind_from_name(name.substr(1)).has_value();
    };
    for (const auto& edge : graph.edges()) {
        CHECK(!(is_relation(edge.from) && is_relation(edge.to)));
    }
}

TEST_CASE("signal accumulation respects thresholds") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);

    const int touch = graph.find("#touch");
    const int action = graph.find("#action");
    const int subject = graph.find("#subject");

    SUBCASE("one signal activates a threshold-1 neuron") {
        graph.stimulate(touch, 1.0);
        graph.step_activation();
        CHECK(graph.neuron(touch).active);
    }
    SUBCASE("a joint neuron stays inactive on a single signal") {
        graph.stimulate(touch, 1.0);
        graph.step_activation();
        CHECK(!graph.neuron(action).active); // got 1 of 2 required signals
        CHECK(!graph.neuron(subject).active);
    }
    SUBCASE("two signals activate a threshold-2 neuron") {
        graph.stimulate(action, 1.0);
        graph.stimulate(action, 1.0);
        graph.step_activation();
        CHECK(graph.neuron(action).active);
        // #action emitted; roles got 1 of 2 signals.
        CHECK(!graph.neuron(subject).active);
    }
    SUBCASE("activation is monotonic within a slot and resets at close") {
        graph.stimulate(touch, 1.0);
        graph.step_activation();
        graph.step_activation();
        CHECK(graph.neuron(touch).active);
        graph.close_slot();
        CHECK(!graph.neuron(touch).active);
        CHECK(graph.neuron(touch).accumulated == 0.0);
        CHECK(graph.neuron(touch).ever_active);
    }
}

TEST_CASE("fire_wire_how wires a touch stamp to both participants") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const int stamp = fire_wire_how(graph, touch_event(0, 36, 38));
    CHECK(graph.neuron(stamp).kind == NeuronKind::ActionStamp);
    CHECK(action_stamp_kind(graph, stamp) == RelationKind::Touch);

    std::vector<std::string> targets;
    for (int to : graph.out_edges(stamp)) targets.push_back(graph.neuron(to).name);
    CHECK(targets == std::vector<std::string>{"ins_entity_36", "ins_entity_38"});
    CHECK(graph.neuron(graph.find("#touch")).active);
    CHECK(graph.neuron(graph.find("ins_entity_36")).active);
}

TEST_CASE("a unary relation stamp binds exactly one participant") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    RelationEvent rest;
    rest.slot_index = 0;
    rest.kind = RelationKind::Rest;
    rest.participants = {7};
    const int stamp = fire_wire_how(graph, rest);
    int entity_edges = 0;
    for (int to : graph.out_edges(stamp)) {
        entity_edges += graph.neuron(to).kind == NeuronKind::EntityInstance;
    }
    CHECK(entity_edges == 1);
}

TEST_CASE("two touches in one slot create two distinct stamps") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const int first = fire_wire_how(graph, touch_event(0, 1, 2));
    const int second = fire_wire_how(graph, touch_event(0, 3, 4));
    CHECK(first != second);
    int stamps = 0;
    for (const auto& record : graph.creation_log()) {
        if (!record.is_edge && graph.neuron(record.id).kind == NeuronKind::ActionStamp) ++stamps;
    }
    CHECK(stamps == 2);
}

TEST_CASE("a direction change activates only the matching attribute neuron") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    RelationEvent event;
    event.slot_index = 0;
    event.kind = RelationKind::ChangeDirection;
    event.participants = {5};
    event.direction_label = "right";
    const int stamp = fire_wire_how(graph, event);
    CHECK(graph.neuron(graph.find("#right")).active);
    CHECK(!graph.neuron(graph.find("#left")).active);
    CHECK(!graph.neuron(graph.find("#back")).active);
    // The concept instance hangs off both the attribute and the stamp.
    int concept_id = -1;
    for (int to : graph.out_edges(stamp)) {
        if (graph.neuron(to).kind == NeuronKind::ConceptInstance) concept_id = to;
    }
    REQUIRE(concept_id >= 0);
    bool from_attr = false;
    for (int from : graph.in_edges(concept_id)) from_attr |= graph.neuron(from).name == "#right";
    CHECK(from_attr);
}

TEST_CASE("fire_wire_what binds three concepts per entity and is idempotent") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const auto track = labeled_track(36, "yellow", "metal", "cube");
    fire_wire_how(graph, touch_event(0, 36, 38));
    const int stamp = fire_wire_what(graph, track);
    const std::size_t neurons_after = graph.neurons().size();
    const std::size_t edges_after = graph.edges().size();
    CHECK(fire_wire_what(graph, track) == stamp);
    CHECK(graph.neurons().size() == neurons_after);
    CHECK(graph.edges().size() == edges_after);

    std::vector<std::string> words;
    for (int concept_id : graph.out_edges(stamp)) {
        if (graph.neuron(concept_id).kind != NeuronKind::ConceptInstance) continue;
        for (int to : graph.out_edges(concept_id)) {
            if (graph.neuron(to).kind == NeuronKind::Lexical) words.push_back(graph.neuron(to).name);
        }
    }
    CHECK(words == std::vector<std::string>{"_metal", "_yellow", "_cube"});
    CHECK(graph.neuron(graph.find("_metal")).ever_active);

    // concept instances linked from #attr
    int from_attr = 0;
    for (int to : graph.out_edges(graph.find("#attr"))) {
        from_attr += graph.neuron(to).kind == NeuronKind::ConceptInstance;
    }
    CHECK(from_attr == 3);
}

TEST_CASE("concept count is three per distinct entity") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    fire_wire_how(graph, touch_event(0, 1, 2));
    fire_wire_what(graph, labeled_track(1, "red", "rubber", "sphere"));
    fire_wire_what(graph, labeled_track(2, "blue", "metal", "cube"));
    fire_wire_what(graph, labeled_track(1, "red", "rubber", "sphere"));
    int concepts = 0;
    for (const auto& neuron : graph.neurons()) {
        concepts += neuron.kind == NeuronKind::ConceptInstance;
    }
    CHECK(concepts == 6);
}

TEST_CASE("temporal binding chains one time stamp per slot") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    std::vector<int> stamps;
    for (int slot = 0; slot < 5; ++slot) {
        graph.begin_slot(slot);
        std::vector<int> action_stamps;
        if (slot == 2) action_stamps.push_back(fire_wire_how(graph, touch_event(2, 0, 1)));
        stamps.push_back(bind_time(graph, slot, action_stamps));
        graph.close_slot();
    }
    CHECK(graph.time_chain() == stamps);
    int chain_edges = 0;
    for (const auto& edge : graph.edges()) {
        if (graph.neuron(edge.from).kind == NeuronKind::TimeStamp &&
            graph.neuron(edge.to).kind == NeuronKind::TimeStamp) {
            ++chain_edges;
        }
    }
    CHECK(chain_edges == 4);
    CHECK(graph.out_edges(stamps[0]).size() == 1); // chain edge only, no action stamps
    CHECK(time_stamp_slot(graph, stamps[3]) == 3);
    CHECK(check_graph_invariants(graph).ok());
}

TEST_CASE("out-of-order slots are rejected") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    bind_time(graph, 0, {});
    CHECK_THROWS_AS(graph.begin_slot(2), OutOfOrderSlot);
    CHECK_THROWS_AS(bind_time(graph, 0, {}), OutOfOrderSlot);
}

TEST_CASE("ablation parsing accepts kinds and groups, rejects junk") {
    const AblationSet touch = AblationSet::parse({"touch"});
    CHECK(touch.contains(RelationKind::Touch));
    const AblationSet trends = AblationSet::parse({"distance_change"});
    CHECK(trends.contains(RelationKind::GoCloser));
    CHECK(trends.contains(RelationKind::GoFartherThenCloser));
    CHECK(!trends.contains(RelationKind::Touch));
    const AblationSet rest_state = AblationSet::parse({"rest_state"});
    CHECK(rest_state.rest_state);
    CHECK_THROWS_AS(AblationSet::parse({"gravity"}), UnknownKind);
}

TEST_CASE("ablated relation neurons disappear from the graph") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    remove_ablated_nature(graph, AblationSet::parse({"touch"}));
    CHECK(graph.find("#touch") == -1);
    CHECK(graph.find("#move") >= 0);
    RelationEvent event = touch_event(0, 0, 1);
    graph.begin_slot(0);
    CHECK_THROWS_AS(fire_wire_how(graph, event), UnknownRelationKind);
}

TEST_CASE("time shuffle permutes the chain but keeps membership and path shape") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    std::vector<int> original;
    for (int slot = 0; slot < 5; ++slot) {
        graph.begin_slot(slot);
        std::vector<int> action_stamps{fire_wire_how(graph, touch_event(slot, 0, 1))};
        original.push_back(bind_time(graph, slot, action_stamps));
        graph.close_slot();
    }
    NeuronGraph twin = graph;
    shuffle_time(graph, 42);
    shuffle_time(twin, 42);
    CHECK(graph.time_chain() == twin.time_chain());
    CHECK(graph.time_chain() != original); // 5! orderings; seed 42 permutes
    auto sorted_chain = graph.time_chain();
    std::sort(sorted_chain.begin(), sorted_chain.end());
    auto sorted_original = original;
    std::sort(sorted_original.begin(), sorted_original.end());
    CHECK(sorted_chain == sorted_original);
    CHECK(check_graph_invariants(graph).ok());

    NeuronGraph single = load_nature_design(cfg);
    single.begin_slot(0);
    bind_time(single, 0, {});
    const auto chain_before = single.time_chain();
    shuffle_time(single, 7);
    CHECK(single.time_chain() == chain_before);
}

TEST_CASE("graph serialization round trips byte-for-byte") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const int stamp = fire_wire_how(graph, touch_event(0, 3, 4));
    fire_wire_what(graph, labeled_track(3, "red", "rubber", "sphere"));
    fire_wire_what(graph, labeled_track(4, "cyan", "metal", "cylinder"));
    bind_time(graph, 0, {stamp});
    graph.close_slot();

    const auto dumped = graph_to_json(graph).dump(2);
    const NeuronGraph reloaded = graph_from_json(graph_to_json(graph));
    CHECK(graph_to_json(reloaded).dump(2) == dumped);
    CHECK(graph_to_dot(reloaded) == graph_to_dot(graph));
    CHECK(check_graph_invariants(reloaded).ok());
}

TEST_CASE("dot export omits inactive neurons and colors by kind") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const int stamp = fire_wire_how(graph, touch_event(0, 0, 1));
    bind_time(graph, 0, {stamp});
    graph.close_slot();
    const std::string dot = graph_to_dot(graph);
    CHECK(dot.find("\"#touch\" [fillcolor=red]") != std::string::npos);
    CHECK(dot.find("\"stamp_time_1\" [fillcolor=purple]") != std::string::npos);
    CHECK(dot.find("\"ins_entity_0\" [fillcolor=green]") != std::string::npos);
    CHECK(dot.find("#go_closer") == std::string::npos); // never activated
    CHECK(dot.find("\"#touch\" -> ") != std::string::npos);
}

TEST_CASE("invariant checker flags arity violations") {
    const EngineConfig cfg;
    NeuronGraph graph = load_nature_design(cfg);
    graph.begin_slot(0);
    const int stamp = fire_wire_how(graph, touch_event(0, 0, 1));
    bind_time(graph, 0, {stamp});
    graph.close_slot();
    CHECK(check_graph_invariants(graph).ok());
    // Wire a third entity into the binary stamp.
    graph.add_edge(stamp, graph.ensure_entity_instance(9));
    CHECK(!check_graph_invariants(graph).ok());
}
