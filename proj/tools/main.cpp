// Batch command-line entry point: describe / simulate / eval / prompt.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "srnn/pipeline.hpp"

namespace {

using nlohmann::json;

srnn::EngineConfig resolve_config(const std::string& flag_path, std::string* used_path) {
    std::string path = flag_path;
    if (path.empty()) {
        if (const char* env = std::getenv("SRNN_CONFIG")) path = env;
    }
    if (path.empty()) {
        *used_path = "";
        return srnn::EngineConfig{};
    }
    *used_path = path;
    return srnn::load_config(path);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw srnn::Error("cannot write " + path.string());
    out << text;
}

int run_describe(const std::vector<std::string>& inputs, const srnn::EngineConfig& cfg,
                 const std::string& config_path, const srnn::RunOptions& options,
                 const std::string& out_dir, int jobs) {
    std::vector<srnn::VideoDoc> docs;
    for (const auto& input : inputs) docs.push_back(srnn::load_video(input));

    std::mutex io_mutex;
    std::vector<std::exception_ptr> failures(docs.size());
    auto process = [&](std::size_t i) {
        try {
            const srnn::RunArtifacts artifacts = srnn::run_pipeline(docs[i], cfg, options);
            const std::filesystem::path dir =
                docs.size() == 1 ? std::filesystem::path(out_dir)
                                 : std::filesystem::path(out_dir) / docs[i].video_id;
            const json manifest =
                srnn::write_run_outputs(artifacts, docs[i], options, inputs[i], config_path, dir);
            std::lock_guard<std::mutex> lock(io_mutex);
            std::cout << docs[i].video_id << ": " << artifacts.doc.segments.size() << " slots, "
                      << artifacts.doc.predictions.size() << " predictions -> " << dir.string() << "\n";
            for (const auto& [key, value] : manifest["diagnostics"].items()) {
                if (value.get<std::uint64_t>() != 0) {
                    std::cerr << docs[i].video_id << ": diagnostic " << key << " = " << value << "\n";
                }
            }
        } catch (...) {
            failures[i] = std::current_exception();
        }
    };

    if (jobs <= 1 || docs.size() <= 1) {
        for (std::size_t i = 0; i < docs.size(); ++i) process(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int t = 0; t < std::min<int>(jobs, static_cast<int>(docs.size())); ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < docs.size(); i = next.fetch_add(1)) process(i);
            });
        }
        for (auto& worker : pool) worker.join();
    }
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return 0;
}

int run_simulate(std::uint64_t seed, int n_objects, double noise, const srnn::EngineConfig& cfg,
                 const std::string& out_dir) {
    const srnn::SimScene scene = srnn::generate(seed, n_objects, cfg);
    const json observations = srnn::render_observations(scene, noise, cfg);
    std::filesystem::create_directories(out_dir);
    write_file(std::filesystem::path(out_dir) / "scene.json", srnn::scene_to_json(scene).dump(2) + "\n");
    write_file(std::filesystem::path(out_dir) / "observations.json", observations.dump(2) + "\n");
    std::cout << "scene " << seed << ": " << scene.objects.size() << " objects, " << scene.events.size()
              << " collisions -> " << out_dir << "\n";
    return 0;
}

int run_eval(const std::string& scene_path, const std::string& obs_path, const srnn::EngineConfig& cfg,
             const srnn::RunOptions& options, const std::string& out_path) {
    std::ifstream scene_in(scene_path);
    if (!scene_in) throw srnn::SchemaError("cannot open scene: " + scene_path);
    json scene_doc;
    scene_in >> scene_doc;
    const srnn::SimScene scene = srnn::scene_from_json(scene_doc);

    const srnn::VideoDoc video = srnn::load_video(obs_path);
    if (!video.scene_seed || *video.scene_seed != scene.seed) {
        throw srnn::SeedMismatch("observations were not rendered from this scene (seed mismatch)");
    }

    const srnn::RunArtifacts artifacts = srnn::run_pipeline(video, cfg, options);
    const auto oracle = srnn::oracle_relations(scene, artifacts.effective_config);
    const srnn::EvalReport report =
        srnn::evaluate_against_oracle(artifacts.slot_events, artifacts.tracks, oracle, scene);
    std::cout << report.to_text();
    if (!out_path.empty()) write_file(out_path, report.to_json().dump(2) + "\n");
    return 0;
}

int run_prompt(const std::string& description_path, const std::string& question_path,
               const std::string& out_path) {
    std::ifstream desc_in(description_path, std::ios::binary);
    if (!desc_in) throw srnn::SchemaError("cannot open description: " + description_path);
    std::string description((std::istreambuf_iterator<char>(desc_in)), std::istreambuf_iterator<char>());

    std::ifstream q_in(question_path);
    if (!q_in) throw srnn::SchemaError("cannot open question: " + question_path);
    json question_doc;
    try {
        q_in >> question_doc;
    } catch (const json::exception& e) {
        throw srnn::SchemaError(std::string("question document: ") + e.what());
    }
    if (!question_doc.contains("qtype") || !question_doc.contains("question")) {
        throw srnn::SchemaError("question document needs 'qtype' and 'question'");
    }
    std::vector<std::string> choices;
    if (question_doc.contains("choices")) {
        choices = question_doc["choices"].get<std::vector<std::string>>();
    }
    const std::string prompt =
        srnn::assemble_prompt(description, question_doc["question"].get<std::string>(),
                              question_doc["qtype"].get<std::string>(), choices);
    if (out_path.empty()) {
        std::cout << prompt;
    } else {
        write_file(out_path, prompt);
        std::cout << "prompt -> " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spatiotemporal relation engine: scene observations to neuron graphs, "
                 "descriptions and touch forecasts"};
    app.require_subcommand(1);

    std::string config_flag;
    app.add_option("--config", config_flag, "config file (overrides SRNN_CONFIG)");

    // describe
    auto* describe = app.add_subcommand("describe", "run the full pipeline on video documents");
    std::vector<std::string> inputs;
    describe->add_option("inputs", inputs, "video JSON documents")->required()->check(CLI::ExistingFile);
    std::string out_dir = "out";
    describe->add_option("--out", out_dir, "output directory");
    srnn::RunOptions options;
    describe->add_option("--ablate", options.ablate,
                         "relation kind to strip (repeatable; also rest_state, distance_change)");
    std::uint64_t shuffle_seed = 0;
    auto* shuffle_flag =
        describe->add_option("--shuffle-time", shuffle_seed, "shuffle the time-stamp chain with this seed");
    int slots_override = 0;
    auto* slots_flag = describe->add_option("--slots", slots_override, "override slot count");
    double fps_override = 0.0;
    auto* fps_flag = describe->add_option("--fps", fps_override, "override the document frame rate");
    describe->add_option("--horizon", options.horizon_slots, "forecast horizon in slot durations");
    int jobs = 1;
    describe->add_option("--jobs", jobs, "videos processed in parallel");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "generate a synthetic scene and observations");
    std::uint64_t sim_seed = 1;
    int sim_objects = 3;
    double sim_noise = 0.0;
    std::string sim_out = "out";
    simulate->add_option("--seed", sim_seed, "scene seed");
    simulate->add_option("--objects", sim_objects, "object count")->check(CLI::PositiveNumber);
    simulate->add_option("--noise", sim_noise, "positional noise sigma")->check(CLI::NonNegativeNumber);
    simulate->add_option("--out", sim_out, "output directory");

    // eval
    auto* eval = app.add_subcommand("eval", "score detector output against the scene oracle");
    std::string eval_scene, eval_obs, eval_out;
    eval->add_option("--scene", eval_scene, "scene.json")->required()->check(CLI::ExistingFile);
    eval->add_option("--obs", eval_obs, "observations.json")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", eval_out, "JSON report path");
    eval->add_option("--ablate", options.ablate, "relation kind to strip (repeatable)");

    // prompt
    auto* prompt = app.add_subcommand("prompt", "assemble a question prompt from a description");
    std::string prompt_desc, prompt_question, prompt_out;
    prompt->add_option("--description", prompt_desc, "description.txt")->required()->check(CLI::ExistingFile);
    prompt->add_option("--question", prompt_question, "question JSON ({qtype, question, choices})")
        ->required()
        ->check(CLI::ExistingFile);
    prompt->add_option("--out", prompt_out, "prompt output path (stdout when omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        std::string config_path;
        const srnn::EngineConfig cfg = resolve_config(config_flag, &config_path);
        if (*shuffle_flag) options.shuffle_seed = shuffle_seed;
        if (*slots_flag) options.slot_count = slots_override;
        if (*fps_flag) options.fps = fps_override;

        if (describe->parsed()) return run_describe(inputs, cfg, config_path, options, out_dir, jobs);
        if (simulate->parsed()) return run_simulate(sim_seed, sim_objects, sim_noise, cfg, sim_out);
        if (eval->parsed()) return run_eval(eval_scene, eval_obs, cfg, options, eval_out);
        if (prompt->parsed()) return run_prompt(prompt_desc, prompt_question, prompt_out);
    } catch (const srnn::SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const srnn::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const srnn::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
