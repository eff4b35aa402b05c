#pragma once

#include <string>
#include <vector>

#include "srnn/network.hpp"

namespace srnn {

struct RoleBinding {
    std::string role; // "subject", "object", "goal", "source"
    int entity_id = -1;
    int subaction_id = -1;
};

// The per-action semantic structure: a lemma plus role bindings, each
// realized by a subaction stamp in the graph.
struct SemanticNet {
    int action_stamp = -1;
    int action_instance = -1;
    int lemma_lexical = -1;
    RelationKind kind = RelationKind::Rest;
    std::vector<RoleBinding> bindings;
    int direction_concept = -1; // ChangeDirection only
};

// Verb lemma per relation kind, in lexical-neuron form ("_touch",
// "_go_close_to", ...). Display text replaces underscores with spaces.
std::string lemma_lexical_name(RelationKind kind);
std::string lexical_word(const std::string& lexical_name);

// Builds the semantic network for an action stamp: creates the action
// instance, wires its lemma and #action, lets the joint signals
// activate #action and the role neurons, then binds roles to entities
// through subaction stamps. The stamp's first entity (the mover) is
// the subject; a second entity binds as object, or goal for a future
// touch.
SemanticNet build_semantic_net(NeuronGraph& graph, int action_stamp, Diagnostics* diag = nullptr);

// Read-only reconstruction of a previously built net, used when
// regenerating text from a deserialized graph.
SemanticNet semantic_net_from_graph(const NeuronGraph& graph, int action_stamp);

// Agent phrase first, then the lemma, the patient phrase when present,
// and a "to its <label>" clause for direction changes. Entity phrases
// list texture, color, shape, then the instance name. No subject-verb
// agreement.
std::string generate_sentence(const NeuronGraph& graph, const SemanticNet& net);

struct DescribedSentence {
    std::string text;
    RelationKind kind = RelationKind::Rest;

    bool operator==(const DescribedSentence& other) const = default;
};

struct DescriptionSegment {
    int slot_index = 0;
    std::vector<DescribedSentence> sentences;
};

struct DescriptionDoc {
    std::vector<DescriptionSegment> segments; // in time-chain order
    std::vector<DescribedSentence> predictions;

    std::string to_text() const;
};

// Regenerates the whole document from the graph alone: one segment per
// time stamp in chain order, future-touch sentences collected into the
// trailing prediction section.
DescriptionDoc describe(const NeuronGraph& graph);

// Concatenates the prompt sections in fixed order: task definition,
// video description, question, choices, critical alignments, output
// format. qtype must be one of predictive / counterfactual /
// descriptive / explanatory; throws UnknownQType otherwise.
std::string assemble_prompt(const std::string& description_text, const std::string& question,
                            const std::string& qtype, const std::vector<std::string>& choices);

} // namespace srnn
