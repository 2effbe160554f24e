#include <CLI11.hpp>

#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "copra/pipeline.hpp"
#include "copra/synth.hpp"

namespace {

// Every pipeline flag can appear on any stage subcommand and overrides the
// corresponding config key. Only options that were actually passed are
// applied on top of the loaded config.
struct FlagSet {
    copra::PipelineConfig values;
    std::vector<std::pair<CLI::Option*, std::function<void(copra::PipelineConfig&)>>> appliers;

    void attach(CLI::App* cmd) {
        auto bind = [this, cmd](const char* name, auto& slot, const char* help,
                                std::function<void(copra::PipelineConfig&)> apply) {
            CLI::Option* opt = cmd->add_option(name, slot, help);
            appliers.emplace_back(opt, std::move(apply));
        };
        bind("--tweets", values.tweets, "tweet file (JSON Lines)",
             [this](copra::PipelineConfig& c) { c.tweets = values.tweets; });
        bind("--articles", values.articles, "article file (JSON Lines)",
             [this](copra::PipelineConfig& c) { c.articles = values.articles; });
        bind("--signals", values.signals, "per-user signal CSV",
             [this](copra::PipelineConfig& c) { c.signals = values.signals; });
        bind("--lexicons", values.lexicons, "comma-separated lexicon files",
             [this](copra::PipelineConfig& c) { c.lexicons = values.lexicons; });
        bind("--model", values.model, "classifier model file",
             [this](copra::PipelineConfig& c) { c.model = values.model; });
        bind("--training", values.training, "labeled training corpus (JSON Lines)",
             [this](copra::PipelineConfig& c) { c.training = values.training; });
        bind("--names", values.names, "community name map CSV",
             [this](copra::PipelineConfig& c) { c.names = values.names; });
        bind("--output", values.output_dir, "output directory",
             [this](copra::PipelineConfig& c) { c.output_dir = values.output_dir; });
        bind("--fraction", values.superspreader_fraction, "superspreader fraction",
             [this](copra::PipelineConfig& c) {
                 c.superspreader_fraction = values.superspreader_fraction;
             });
        bind("--alpha", values.alpha, "backbone significance level",
             [this](copra::PipelineConfig& c) { c.alpha = values.alpha; });
        bind("--resolution", values.resolution, "modularity resolution",
             [this](copra::PipelineConfig& c) { c.resolution = values.resolution; });
        bind("--seed", values.seed, "community detection seed",
             [this](copra::PipelineConfig& c) { c.seed = values.seed; });
        bind("--chunk-tokens", values.chunk_tokens, "target tokens per tweet chunk",
             [this](copra::PipelineConfig& c) { c.chunk_tokens = values.chunk_tokens; });
        bind("--lambda", values.lambda, "L2 regularization strength",
             [this](copra::PipelineConfig& c) { c.lambda = values.lambda; });
        bind("--train-seed", values.train_seed, "training seed",
             [this](copra::PipelineConfig& c) { c.train_seed = values.train_seed; });
        bind("--max-iterations", values.max_iterations, "optimizer iteration cap",
             [this](copra::PipelineConfig& c) { c.max_iterations = values.max_iterations; });
        bind("--measures", values.measures, "measure list (ids or kind:psi:phi, or 'all')",
             [this](copra::PipelineConfig& c) { c.measures = values.measures; });
        bind("--k-grid", values.k_grid, "comma-separated coordination thresholds",
             [this](copra::PipelineConfig& c) { c.k_grid = values.k_grid; });
        bind("--frames", values.frames, "frame labels for frame trends, or 'all'",
             [this](copra::PipelineConfig& c) { c.frames = values.frames; });
        bind("--threads", values.threads, "worker threads",
             [this](copra::PipelineConfig& c) { c.threads = values.threads; });
    }

    void apply(copra::PipelineConfig& config) const {
        for (const auto& [opt, fn] : appliers)
            if (opt->count() > 0) fn(config);
    }
};

int guarded_stage(const std::string& name, const std::vector<std::string>& outputs,
                  const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        for (const auto& path : outputs) std::filesystem::remove(path);
        std::cerr << "error: stage " << name << ": " << e.what() << "\n";
        return dynamic_cast<const copra::ConfigError*>(&e) ? 2 : 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"coordination and propaganda analytics pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("-c,--config", config_path, "config file")
        ->envname("COPRA_CONFIG");

    FlagSet flags;
    CLI::App* cmd_ingest = app.add_subcommand("ingest", "load and summarize the corpus");
    CLI::App* cmd_network = app.add_subcommand("network", "build the similarity backbone");
    CLI::App* cmd_communities =
        app.add_subcommand("communities", "detect communities and coordination scores");
    CLI::App* cmd_propaganda = app.add_subcommand("propaganda", "train or apply the classifier");
    cmd_propaganda->require_subcommand(1);
    CLI::App* cmd_train = cmd_propaganda->add_subcommand("train", "fit the classifier");
    CLI::App* cmd_score = cmd_propaganda->add_subcommand("score", "score chunks and articles");
    CLI::App* cmd_trends = app.add_subcommand("trends", "compute measure trends");
    CLI::App* cmd_report = app.add_subcommand("report", "emit tables and charts");
    CLI::App* cmd_run = app.add_subcommand("run", "run the pipeline");
    CLI::App* cmd_synth = app.add_subcommand("synth", "generate a synthetic scenario");

    for (CLI::App* cmd :
         {cmd_ingest, cmd_network, cmd_communities, cmd_train, cmd_score, cmd_trends, cmd_report, cmd_run})
        flags.attach(cmd);

    std::vector<std::string> run_stages;
    cmd_run->add_option("--stage", run_stages, "run only the named stages (repeatable)");

    std::string synth_out = "synth_out";
    std::string synth_communities;
    std::string synth_scenario;
    bool synth_no_config = false;
    copra::ScenarioConfig scenario;
    cmd_synth->add_option("--out", synth_out, "scenario output directory");
    cmd_synth->add_option("--seed", scenario.seed, "generator seed");
    cmd_synth->add_option("--communities", synth_communities,
                          "community plans as size:rho:pi[:automation[:suspension]] groups");
    cmd_synth->add_option("--scenario", synth_scenario, "scenario JSON file (overrides flags)");
    cmd_synth->add_option("--global-pool", scenario.global_pool, "global retweet pool size");
    cmd_synth->add_option("--retweets-min", scenario.retweets_min, "min retweets per user");
    cmd_synth->add_option("--retweets-max", scenario.retweets_max, "max retweets per user");
    cmd_synth->add_option("--chunks-per-user", scenario.chunks_per_user, "chunks per user");
    cmd_synth->add_option("--training-items", scenario.training_items, "training corpus size");
    cmd_synth->add_option("--articles", scenario.article_count, "article count");
    cmd_synth->add_flag("--no-config", synth_no_config, "skip writing config.ini");

    CLI11_PARSE(app, argc, argv);

    try {
        copra::PipelineConfig config;
        if (!config_path.empty()) config = copra::load_config(config_path);
        flags.apply(config);

        if (app.got_subcommand(cmd_synth)) {
            if (!synth_scenario.empty()) scenario = copra::load_scenario(synth_scenario);
            else if (!synth_communities.empty())
                scenario.communities = copra::parse_communities_arg(synth_communities);
            else
                throw copra::ConfigError("synth needs --communities or --scenario");
            copra::generate(scenario, synth_out);
            // a model fitted to a previous corpus in this directory is stale
            std::filesystem::remove(synth_out + "/model.json");
            if (!synth_no_config) {
                copra::PipelineConfig generated;
                generated.tweets = synth_out + "/tweets.jsonl";
                generated.articles = synth_out + "/articles.jsonl";
                generated.signals = synth_out + "/signals.csv";
                generated.training = synth_out + "/training.jsonl";
                generated.model = synth_out + "/model.json";
                generated.output_dir = synth_out + "/bundle";
                generated.superspreader_fraction = 1.0;  // every planted member retweets
                // planted communities are near-uniform cliques; the disparity
                // filter only rates heterogeneous edges as significant, so the
                // scenario config keeps a permissive threshold
                generated.alpha = 0.5;
                generated.seed = scenario.seed;
                generated.train_seed = scenario.seed;
                copra::write_config(generated, synth_out + "/config.ini");
            }
            return 0;
        }

        if (app.got_subcommand(cmd_ingest)) return copra::run_pipeline(config, {"ingest"});
        if (app.got_subcommand(cmd_network)) return copra::run_pipeline(config, {"network"});
        if (app.got_subcommand(cmd_communities)) return copra::run_pipeline(config, {"communities"});
        if (app.got_subcommand(cmd_propaganda)) {
            std::filesystem::create_directories(config.output_dir);
            if (cmd_propaganda->got_subcommand(cmd_train))
                return guarded_stage("propaganda", {config.model},
                                     [&] { copra::stage_propaganda_train(config); });
            return guarded_stage("propaganda",
                                 {config.output_dir + "/items_tweets.csv",
                                  config.output_dir + "/items_articles.csv"},
                                 [&] { copra::stage_propaganda_score(config); });
        }
        if (app.got_subcommand(cmd_trends)) return copra::run_pipeline(config, {"trends"});
        if (app.got_subcommand(cmd_report)) return copra::run_pipeline(config, {"report"});
        if (app.got_subcommand(cmd_run)) return copra::run_pipeline(config, run_stages);
    } catch (const copra::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
