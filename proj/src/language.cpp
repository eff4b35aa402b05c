#include "srnn/language.hpp"

#include <algorithm>

namespace srnn {

std::string lemma_lexical_name(RelationKind kind) {
    switch (kind) {
        case RelationKind::Rest:
            return "_rest";
        case RelationKind::Move:
            return "_move";
        case RelationKind::RestFirstThenMove:
            return "_rest_first_then_move";
        case RelationKind::MoveFirstThenRest:
            return "_move_first_then_rest";
        case RelationKind::ChangeDirection:
            return "_change_direction";
        case RelationKind::GoCloser:
            return "_go_close_to";
        case RelationKind::GoFarther:
            return "_go_far_from";
        case RelationKind::GoFartherThenCloser:
            return "_go_far_from_then_close_to";
        case RelationKind::GoCloserThenFarther:
            return "_go_close_to_then_far_from";
        case RelationKind::Touch:
            return "_touch";
        case RelationKind::FutureTouch:
            return "_will_touch";
    }
    return "_unknown";
}

std::string lexical_word(const std::string& lexical_name) {
    std::string word = lexical_name.substr(1);
    std::replace(word.begin(), word.end(), '_', ' ');
    return word;
}

namespace {

int find_lexical_target(const NeuronGraph& graph, int id) {
    for (int to : graph.out_edges(id)) {
        if (graph.neuron(to).kind == NeuronKind::Lexical) return to;
    }
    return -1;
}

int ensure_lexical(NeuronGraph& graph, const std::string& name) {
    const int existing = graph.find(name);
    if (existing >= 0) return existing;
    return graph.add_neuron(name, NeuronKind::Lexical, 1.0, false);
}

std::vector<int> stamp_entities(const NeuronGraph& graph, int action_stamp) {
    std::vector<int> out;
    for (int to : graph.out_edges(action_stamp)) {
        if (graph.neuron(to).kind == NeuronKind::EntityInstance) out.push_back(to);
    }
    return out;
}

int stamp_direction_concept(const NeuronGraph& graph, int action_stamp) {
    for (int to : graph.out_edges(action_stamp)) {
        if (graph.neuron(to).kind == NeuronKind::ConceptInstance) return to;
    }
    return -1;
}

// The direction word is recoverable from the attribute neuron pointing
// at the concept_id instance.
std::string direction_word(const NeuronGraph& graph, int concept_id) {
    for (int from : graph.in_edges(concept_id)) {
        const Neuron& n = graph.neuron(from);
        if (n.kind == NeuronKind::Nature && !n.name.empty() && n.name[0] == '#') return n.name.substr(1);
    }
    return "";
}

} // namespace

SemanticNet build_semantic_net(NeuronGraph& graph, int action_stamp, Diagnostics* diag) {
    SemanticNet net;
    net.action_stamp = action_stamp;
    const auto kind = action_stamp_kind(graph, action_stamp);
    if (!kind) throw Error("build_semantic_net: action stamp has no relation edge");
    net.kind = *kind;
    const std::vector<int> entities = stamp_entities(graph, action_stamp);

    net.action_instance = graph.add_neuron(graph.make_name("ins_action"), NeuronKind::ActionInstance, 1.0,
                                           true);
    graph.add_edge(action_stamp, net.action_instance);
    net.lemma_lexical = ensure_lexical(graph, lemma_lexical_name(net.kind));
    graph.add_edge(net.action_instance, net.lemma_lexical);
    const int action = graph.find("#action");
    if (action >= 0) graph.add_edge(net.action_instance, action);
    // Joint signals from the instance and the relation neuron drive
    // #action, which in turn recruits the role neurons.
    graph.send(net.action_instance, 1.0);
    graph.step_activation(diag);

    std::vector<std::pair<std::string, int>> roles;
    if (!entities.empty()) roles.emplace_back("subject", entities[0]); // mover-first order
    if (entities.size() > 1) {
        roles.emplace_back(net.kind == RelationKind::FutureTouch ? "goal" : "object", entities[1]);
    }
    for (const auto& [role, entity] : roles) {
        const int role_neuron = graph.find("#" + role);
        const int subaction = graph.add_neuron(graph.make_name("stamp_subaction"),
                                               NeuronKind::SubactionStamp, 1.0, true);
        graph.add_edge(net.action_instance, subaction);
        if (role_neuron >= 0) graph.add_edge(subaction, role_neuron);
        graph.add_edge(subaction, entity);
        net.bindings.push_back({role, entity, subaction});
    }

    if (net.kind == RelationKind::ChangeDirection) {
        net.direction_concept = stamp_direction_concept(graph, action_stamp);
        if (net.direction_concept >= 0) {
            const int lexical = ensure_lexical(graph, "_" + direction_word(graph, net.direction_concept));
            graph.add_edge(net.direction_concept, lexical);
            graph.send(net.direction_concept, 1.0);
            graph.step_activation(diag);
        }
    }
    return net;
}

SemanticNet semantic_net_from_graph(const NeuronGraph& graph, int action_stamp) {
    SemanticNet net;
    net.action_stamp = action_stamp;
    if (const auto kind = action_stamp_kind(graph, action_stamp)) net.kind = *kind;
    for (int to : graph.out_edges(action_stamp)) {
        if (graph.neuron(to).kind == NeuronKind::ActionInstance) net.action_instance = to;
    }
    net.direction_concept = stamp_direction_concept(graph, action_stamp);
    if (net.action_instance < 0) return net;
    net.lemma_lexical = find_lexical_target(graph, net.action_instance);
    for (int to : graph.out_edges(net.action_instance)) {
        if (graph.neuron(to).kind != NeuronKind::SubactionStamp) continue;
        RoleBinding binding;
        binding.subaction_id = to;
        for (int target : graph.out_edges(to)) {
            const Neuron& n = graph.neuron(target);
            if (n.kind == NeuronKind::Nature && !n.name.empty() && n.name[0] == '#') {
                binding.role = n.name.substr(1);
            }
            if (n.kind == NeuronKind::EntityInstance) binding.entity_id = target;
        }
        net.bindings.push_back(binding);
    }
    return net;
}

namespace {

std::string entity_phrase(const NeuronGraph& graph, int entity_id) {
    std::string phrase;
    for (int to : graph.out_edges(entity_id)) {
        if (graph.neuron(to).kind != NeuronKind::EntityStamp) continue;
        for (int concept_id : graph.out_edges(to)) {
            if (graph.neuron(concept_id).kind != NeuronKind::ConceptInstance) continue;
            const int lexical = find_lexical_target(graph, concept_id);
            if (lexical < 0) continue;
            phrase += lexical_word(graph.neuron(lexical).name) + " ";
        }
        break;
    }
    return phrase + graph.neuron(entity_id).name;
}

const RoleBinding* find_role(const SemanticNet& net, const char* role) {
    for (const auto& b : net.bindings) {
        if (b.role == role) return &b;
    }
    return nullptr;
}

} // namespace

std::string generate_sentence(const NeuronGraph& graph, const SemanticNet& net) {
    std::string sentence = "the ";
    if (const RoleBinding* subject = find_role(net, "subject")) {
        sentence += entity_phrase(graph, subject->entity_id);
    }
    sentence += " " + (net.lemma_lexical >= 0 ? lexical_word(graph.neuron(net.lemma_lexical).name)
                                              : lexical_word(lemma_lexical_name(net.kind)));
    if (const RoleBinding* object = find_role(net, "object")) {
        sentence += " " + entity_phrase(graph, object->entity_id);
    }
    if (const RoleBinding* goal = find_role(net, "goal")) {
        // "will touch" carries its own directionality; no preposition.
        sentence += " " + entity_phrase(graph, goal->entity_id);
    }
    if (const RoleBinding* source = find_role(net, "source")) {
        sentence += " from " + entity_phrase(graph, source->entity_id);
    }
    if (net.direction_concept >= 0) {
        const int lexical = find_lexical_target(graph, net.direction_concept);
        if (lexical >= 0) sentence += " to its " + lexical_word(graph.neuron(lexical).name);
    }
    return sentence + ".";
}

DescriptionDoc describe(const NeuronGraph& graph) {
    DescriptionDoc doc;
    for (int time_stamp : graph.time_chain()) {
        DescriptionSegment segment;
        segment.slot_index = time_stamp_slot(graph, time_stamp);
        for (int stamp : graph.out_edges(time_stamp)) {
            if (graph.neuron(stamp).kind != NeuronKind::ActionStamp) continue;
            const SemanticNet net = semantic_net_from_graph(graph, stamp);
            DescribedSentence sentence{generate_sentence(graph, net), net.kind};
            if (net.kind == RelationKind::FutureTouch) {
                doc.predictions.push_back(std::move(sentence));
            } else {
                segment.sentences.push_back(std::move(sentence));
            }
        }
        doc.segments.push_back(std::move(segment));
    }
    return doc;
}

std::string DescriptionDoc::to_text() const {
    std::string out;
    for (const auto& segment : segments) {
        out += "== time slot " + std::to_string(segment.slot_index + 1) + " ==\n";
        for (const auto& sentence : segment.sentences) out += sentence.text + "\n";
    }
    if (!predictions.empty()) {
        out += "== prediction ==\n";
        for (const auto& sentence : predictions) out += sentence.text + "\n";
    }
    return out;
}

} // namespace srnn
