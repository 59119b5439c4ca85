#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "wingbeat/commands.hpp"
#include "wingbeat/errors.hpp"

namespace {

wingbeat::RunConfig make_config(const std::string& config_path, unsigned long long seed,
                                bool seed_set, int jobs, bool jobs_set) {
    wingbeat::RunConfig config;
    if (!config_path.empty()) config = wingbeat::load_run_config(config_path);
    if (seed_set) config.seed = seed;
    if (jobs_set) config.jobs = jobs;
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wingbeat - flying-insect flight-sound classification toolkit"};
    app.require_subcommand(1);

    std::string config_path, out, manifest, model_path, input_dir, experiment, target,
        eval_class;
    unsigned long long seed = 1;
    int jobs = 1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "run configuration (JSON)");
        cmd->add_option("--seed", seed, "random seed");
        cmd->add_option("--jobs", jobs, "parallelism degree");
    };

    CLI::App* detect = app.add_subcommand("detect", "extract insect events from recordings");
    detect->add_option("input", input_dir, "directory of raw WAV recordings")->required();
    detect->add_option("--out", out, "output directory")->required();
    add_common(detect);

    CLI::App* train = app.add_subcommand("train", "train a classifier from a labeled manifest");
    train->add_option("manifest", manifest, "labeled manifest CSV")->required();
    train->add_option("--out", out, "model output path (JSON)")->required();
    add_common(train);

    CLI::App* classify = app.add_subcommand("classify", "classify snippets with a trained model");
    classify->add_option("manifest", manifest, "manifest CSV of snippets")->required();
    classify->add_option("--model", model_path, "trained model (JSON)")->required();
    classify->add_option("--out", out, "predictions CSV path")->required();
    add_common(classify);

    CLI::App* eval = app.add_subcommand("eval", "run an evaluation experiment");
    eval->add_option("experiment", experiment,
                     "loo|bayes-error|sweep|scaling|ablation|independence|geo-sim")
        ->required();
    eval->add_option("manifest", manifest, "manifest CSV (not needed for geo-sim)");
    eval->add_option("--out", out, "run directory")->required();
    eval->add_option("--target", target, "target class for sweep/ablation");
    eval->add_option("--class", eval_class, "class for the independence check");
    add_common(eval);

    CLI::App* synth = app.add_subcommand("synth", "generate synthetic datasets");
    synth->add_option("--out", out, "output directory")->required();
    add_common(synth);

    CLI11_PARSE(app, argc, argv);

    try {
        const bool seed_set = app.get_subcommand()->count("--seed") > 0;
        const bool jobs_set = app.get_subcommand()->count("--jobs") > 0;
        wingbeat::RunConfig config = make_config(config_path, seed, seed_set, jobs, jobs_set);

        if (detect->parsed()) return wingbeat::cmd_detect(input_dir, out, config, std::cout);
        if (train->parsed()) return wingbeat::cmd_train(manifest, out, config, std::cout);
        if (classify->parsed()) {
            return wingbeat::cmd_classify(manifest, model_path, out, config, std::cout);
        }
        if (eval->parsed()) {
            if (!target.empty()) config.eval_target = target;
            if (!eval_class.empty()) config.eval_class = eval_class;
            if (experiment != "geo-sim" && manifest.empty()) {
                std::cerr << "eval: manifest is required for " << experiment << "\n";
                return 2;
            }
            return wingbeat::cmd_eval(experiment, manifest, out, config, std::cout);
        }
        if (synth->parsed()) return wingbeat::cmd_synth(out, config, std::cout);
    } catch (const wingbeat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
