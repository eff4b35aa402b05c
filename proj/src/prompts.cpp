#include "srnn/language.hpp"

namespace srnn {

namespace {

struct PromptTemplate {
    const char* task_definition;
    const char* critical_alignments;
    const char* output_format;
};

const PromptTemplate kPredictive = {
    "You are given a text description of a short rigid-body video, segmented into time slots, "
    "followed by a prediction section listing touches the engine expects after the video ends. "
    "Answer a question about what will happen next.",
    "- Objects are named by their attributes plus an instance id (e.g. \"metal yellow cube "
    "ins_entity_3\"); treat the id as the object's identity.\n"
    "- \"touch\" means a physical collision between the two objects.\n"
    "- The prediction section is the only evidence about events after the video ends; sentences "
    "with \"will touch\" describe expected future collisions.\n"
    "- An option is correct exactly when it is supported by the description or the prediction "
    "section.",
    "For each option, answer \"yes\" or \"no\" on its own line, in the order the options are "
    "listed. Output nothing else."};

const PromptTemplate kCounterfactual = {
    "You are given a text description of a short rigid-body video, segmented into time slots. "
    "Answer a question about what would have happened if a named object were removed from the "
    "scene.",
    "- Objects are named by their attributes plus an instance id (e.g. \"metal yellow cube "
    "ins_entity_3\"); treat the id as the object's identity.\n"
    "- \"touch\" means a physical collision between the two objects.\n"
    "- When an object is removed, every collision it participates in disappears, and objects it "
    "would have deflected keep their prior motion instead.\n"
    "- Collisions between objects that never depend on the removed object still happen.",
    "For each option, answer \"yes\" or \"no\" on its own line, in the order the options are "
    "listed. Output nothing else."};

const PromptTemplate kDescriptive = {
    "You are given a text description of a short rigid-body video, segmented into time slots. "
    "Answer a factual question about the objects, their attributes, or their relations (existence, "
    "counting, or querying shape, material, or color).",
    "- Objects are named by their attributes plus an instance id (e.g. \"metal yellow cube "
    "ins_entity_3\"); treat the id as the object's identity.\n"
    "- Count objects by distinct instance ids.\n"
    "- \"rest\" means stationary for the whole slot; \"move\" means displacement during the slot.\n"
    "- Time slots are numbered in temporal order; \"the start of the video\" is slot 1 and \"the "
    "end of the video\" is the last slot.",
    "Answer with a single word or number on one line. Output nothing else."};

const PromptTemplate kExplanatory = {
    "You are given a text description of a short rigid-body video, segmented into time slots. "
    "Answer a question about which earlier events are responsible for a named event.",
    "- Objects are named by their attributes plus an instance id (e.g. \"metal yellow cube "
    "ins_entity_3\"); treat the id as the object's identity.\n"
    "- \"touch\" means a physical collision between the two objects.\n"
    "- An event is responsible when it lies on the causal chain leading to the queried event; all "
    "such earlier events count, not only the most recent one.\n"
    "- Use the time-slot order to decide which events precede which.",
    "For each option, answer \"yes\" or \"no\" on its own line, in the order the options are "
    "listed. Output nothing else."};

const PromptTemplate* template_for(const std::string& qtype) {
    if (qtype == "predictive") return &kPredictive;
    if (qtype == "counterfactual") return &kCounterfactual;
    if (qtype == "descriptive") return &kDescriptive;
    if (qtype == "explanatory") return &kExplanatory;
    return nullptr;
}

} // namespace

std::string assemble_prompt(const std::string& description_text, const std::string& question,
                            const std::string& qtype, const std::vector<std::string>& choices) {
    const PromptTemplate* tpl = template_for(qtype);
    if (tpl == nullptr) throw UnknownQType("unknown question type: '" + qtype + "'");

    std::string out;
    out += "== task definition ==\n";
    out += std::string(tpl->task_definition) + "\n\n";
    out += "== video description ==\n";
    out += description_text;
    if (!description_text.empty() && description_text.back() != '\n') out += "\n";
    out += "\n== question ==\n";
    out += question + "\n";
    if (!choices.empty()) {
        out += "\n== choices ==\n";
        for (std::size_t i = 0; i < choices.size(); ++i) {
            out += std::to_string(i + 1) + ". " + choices[i] + "\n";
        }
    }
    out += "\n== critical alignments ==\n";
    out += std::string(tpl->critical_alignments) + "\n";
    out += "\n== output format ==\n";
    out += std::string(tpl->output_format) + "\n";
    return out;
}

} // namespace srnn
