// Command line front end: synthetic data generation, model training,
// clustering, evaluation, threshold sweeps, the photo-only vs social
// ablation and PPR inspection.

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "evdet/clustering.hpp"
#include "evdet/io_util.hpp"
#include "evdet/metrics.hpp"
#include "evdet/pipeline.hpp"
#include "evdet/records.hpp"
#include "evdet/similarity.hpp"
#include "evdet/synth.hpp"

namespace {

evdet::PipelineConfig load_config(const std::string& path) {
    if (path.empty()) return evdet::PipelineConfig{};
    return evdet::PipelineConfig::load(path);
}

std::string render_photos(const evdet::PhotoCollection& photos) {
    std::ostringstream out;
    evdet::write_photo_records(out, photos);
    return out.str();
}

std::string render_interactions(const evdet::InteractionLog& log) {
    std::ostringstream out;
    evdet::write_interactions(out, log);
    return out.str();
}

struct SynthArgs {
    std::string config_path;
    std::string out_photos;
    std::string out_interactions;
    std::optional<std::uint64_t> seed;
    std::optional<double> ambiguity;
};

int cmd_synth(const SynthArgs& args) {
    evdet::SynthConfig cfg = load_config(args.config_path).synth;
    if (args.seed) cfg.seed = *args.seed;
    if (args.ambiguity) cfg.ambiguity = *args.ambiguity;
    cfg.validate();
    evdet::SynthDataset data = evdet::generate(cfg);
    evdet::atomic_write_file(args.out_photos, render_photos(data.photos));
    evdet::atomic_write_file(args.out_interactions, render_interactions(data.interactions));
    std::cout << "wrote " << data.photos.size() << " photos, " << data.interactions.size()
              << " interactions\n";
    return 0;
}

struct TrainArgs {
    std::string photos_path;
    std::string interactions_path;
    std::string config_path;
    std::string model_path;
    std::optional<std::uint64_t> seed;
    std::optional<double> lambda;
    std::optional<int> epochs;
    bool no_social = false;
};

int cmd_train(const TrainArgs& args) {
    evdet::PipelineConfig cfg = load_config(args.config_path);
    if (args.seed) {
        cfg.sampling.seed = *args.seed;
        cfg.training.seed = *args.seed;
    }
    if (args.lambda) cfg.training.lambda = *args.lambda;
    if (args.epochs) cfg.training.epochs = *args.epochs;
    if (args.no_social) cfg.toggles.enable_social = false;
    cfg.training.validate();
    cfg.sampling.validate();

    evdet::PhotoCollection photos = evdet::parse_photo_records_file(args.photos_path);
    evdet::InteractionLog interactions = evdet::parse_interactions_file(args.interactions_path);
    evdet::SimilarityModel model = evdet::run_train(photos, interactions, cfg);
    model.save(args.model_path);
    std::cout << "trained on " << photos.size() << " photos; model written to " << args.model_path
              << "\n";
    return 0;
}

struct ClusterArgs {
    std::string photos_path;
    std::string interactions_path;
    std::string config_path;
    std::string model_path;
    std::string out_path;
    std::optional<double> mu;
    std::optional<std::int64_t> window_seconds;
};

int cmd_cluster(const ClusterArgs& args) {
    evdet::PipelineConfig cfg = load_config(args.config_path);
    if (args.window_seconds) cfg.cluster_window_seconds = *args.window_seconds;
    double mu = args.mu ? *args.mu : cfg.mu;

    evdet::PhotoCollection photos = evdet::parse_photo_records_file(args.photos_path);
    evdet::InteractionLog interactions = evdet::parse_interactions_file(args.interactions_path);
    evdet::SimilarityModel model = evdet::SimilarityModel::load(args.model_path);

    evdet::Clustering clustering = evdet::run_cluster(photos, interactions, model, cfg, mu);
    evdet::PhotoStream stream = evdet::order_stream(photos, cfg.stream_order);
    std::ostringstream out;
    evdet::write_clustering_csv(out, stream, clustering);
    evdet::atomic_write_file(args.out_path, out.str());
    std::cout << clustering.clusters.size() << " clusters over " << photos.size()
              << " photos at mu=" << mu << "\n";
    return 0;
}

struct EvaluateArgs {
    std::string clusters_path;
    std::string photos_path;
    std::string out_path;
    double mu = -1.0;  // metrics don't need mu; -1 marks "not supplied"
};

int cmd_evaluate(const EvaluateArgs& args) {
    std::string csv = evdet::read_file_string(args.clusters_path);
    std::istringstream csv_in(csv);
    evdet::ClusteringFile file = evdet::read_clustering_csv(csv_in);

    evdet::PhotoCollection photos = evdet::parse_photo_records_file(args.photos_path);
    evdet::Partition truth = evdet::truth_partition(photos, file.photo_ids);
    evdet::Partition predicted(file.assignment.begin(), file.assignment.end());

    evdet::MetricsReport report = evdet::evaluate_partition(predicted, truth, args.mu);
    evdet::atomic_write_file(args.out_path, evdet::report_to_json_string(report));
    char line[160];
    std::snprintf(line, sizeof(line), "nmi=%.6f bcubed_f1=%.6f clusters=%d photos=%d\n",
                  report.nmi, report.bcubed_f1, report.num_clusters, report.num_photos);
    std::cout << line;
    return 0;
}

struct SweepArgs {
    std::string photos_path;
    std::string interactions_path;
    std::string config_path;
    std::string model_path;
    std::string out_path;
    std::optional<double> mu_min;
    std::optional<double> mu_max;
    std::optional<double> mu_step;
};

int cmd_sweep(const SweepArgs& args) {
    evdet::PipelineConfig cfg = load_config(args.config_path);
    if (args.mu_min) cfg.mu_min = *args.mu_min;
    if (args.mu_max) cfg.mu_max = *args.mu_max;
    if (args.mu_step) cfg.mu_step = *args.mu_step;
    if (!(cfg.mu_step > 0.0)) throw std::runtime_error("mu-step must be > 0");

    evdet::PhotoCollection photos = evdet::parse_photo_records_file(args.photos_path);
    evdet::InteractionLog interactions = evdet::parse_interactions_file(args.interactions_path);
    evdet::SimilarityModel model = evdet::SimilarityModel::load(args.model_path);

    std::vector<double> grid = cfg.mu_grid();
    std::vector<evdet::MetricsReport> reports =
        evdet::run_sweep(photos, interactions, model, cfg, grid);
    evdet::atomic_write_file(args.out_path, evdet::reports_to_json_string(reports));

    evdet::SweepBest best = evdet::sweep_best(reports);
    char line[160];
    std::snprintf(line, sizeof(line), "best nmi=%.6f at mu=%.2f; best bcubed_f1=%.6f at mu=%.2f\n",
                  best.best_nmi, best.mu_at_best_nmi, best.best_bcubed_f1, best.mu_at_best_f1);
    std::cout << line;
    return 0;
}

struct AblationArgs {
    std::string config_path;
    std::string out_path;
};

int cmd_ablation(const AblationArgs& args) {
    evdet::PipelineConfig cfg = load_config(args.config_path);
    evdet::AblationSummary summary = evdet::run_ablation(cfg);
    evdet::atomic_write_file(args.out_path, evdet::ablation_summary_to_json_string(summary));
    char line[200];
    std::snprintf(line, sizeof(line),
                  "seeds=%zu mean photo-only nmi=%.6f mean with-social nmi=%.6f delta=%.6f\n",
                  summary.seeds.size(), summary.mean_photo_only_nmi, summary.mean_with_social_nmi,
                  summary.mean_delta_nmi);
    std::cout << line;
    return 0;
}

struct PprArgs {
    std::string photos_path;
    std::string interactions_path;
    std::string config_path;
    std::string photo_id;
    int top_k = 20;
};

int cmd_ppr(const PprArgs& args) {
    if (args.top_k <= 0) throw std::runtime_error("top-k must be positive");
    evdet::PipelineConfig cfg = load_config(args.config_path);
    evdet::PhotoCollection photos = evdet::parse_photo_records_file(args.photos_path);
    evdet::InteractionLog interactions = evdet::parse_interactions_file(args.interactions_path);
    std::vector<evdet::PprEntry> entries =
        evdet::run_ppr_topk(photos, interactions, cfg, args.photo_id, args.top_k);
    for (const evdet::PprEntry& entry : entries) {
        char line[256];
        std::snprintf(line, sizeof(line), "%s\t%s\t%.12g\n", evdet::to_string(entry.type),
                      entry.label.c_str(), entry.score);
        std::cout << line;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"social event detection over photo streams"};
    app.require_subcommand(1);

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    synth->add_option("--config", synth_args.config_path, "pipeline config JSON (synth section)");
    synth->add_option("--out-photos", synth_args.out_photos, "output photo records (JSONL)")
        ->required();
    synth
        ->add_option("--out-interactions", synth_args.out_interactions,
                     "output interaction records (JSONL)")
        ->required();
    synth->add_option("--seed", synth_args.seed, "override generator seed");
    synth->add_option("--ambiguity", synth_args.ambiguity, "override event overlap factor");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "train the pairwise similarity model");
    train->add_option("--photos", train_args.photos_path, "photo records (JSONL)")->required();
    train->add_option("--interactions", train_args.interactions_path, "interaction records (JSONL)")
        ->required();
    train->add_option("--config", train_args.config_path, "pipeline config JSON");
    train->add_option("--model", train_args.model_path, "output model path")->required();
    train->add_option("--seed", train_args.seed, "override sampling and training seed");
    train->add_option("--lambda", train_args.lambda, "override regularization strength");
    train->add_option("--epochs", train_args.epochs, "override training epochs");
    train->add_flag("--no-social", train_args.no_social, "drop the social affinity feature");

    ClusterArgs cluster_args;
    CLI::App* cluster = app.add_subcommand("cluster", "cluster a photo stream into events");
    cluster->add_option("--photos", cluster_args.photos_path, "photo records (JSONL)")->required();
    cluster
        ->add_option("--interactions", cluster_args.interactions_path,
                     "interaction records (JSONL)")
        ->required();
    cluster->add_option("--config", cluster_args.config_path, "pipeline config JSON");
    cluster->add_option("--model", cluster_args.model_path, "trained model path")->required();
    cluster->add_option("--mu", cluster_args.mu, "clustering threshold");
    cluster->add_option("--window-seconds", cluster_args.window_seconds,
                        "prune clusters whose newest upload is older than this");
    cluster->add_option("--out", cluster_args.out_path, "output assignment CSV")->required();

    EvaluateArgs evaluate_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "score an assignment against ground truth");
    evaluate->add_option("--clusters", evaluate_args.clusters_path, "assignment CSV")->required();
    evaluate->add_option("--photos", evaluate_args.photos_path, "photo records with event ids")
        ->required();
    evaluate->add_option("--mu", evaluate_args.mu, "threshold to record in the report");
    evaluate->add_option("--out", evaluate_args.out_path, "output metrics JSON")->required();

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand("sweep", "cluster and score across a threshold grid");
    sweep->add_option("--photos", sweep_args.photos_path, "photo records (JSONL)")->required();
    sweep->add_option("--interactions", sweep_args.interactions_path, "interaction records (JSONL)")
        ->required();
    sweep->add_option("--config", sweep_args.config_path, "pipeline config JSON");
    sweep->add_option("--model", sweep_args.model_path, "trained model path")->required();
    sweep->add_option("--mu-min", sweep_args.mu_min, "grid start");
    sweep->add_option("--mu-max", sweep_args.mu_max, "grid end (inclusive)");
    sweep->add_option("--mu-step", sweep_args.mu_step, "grid step");
    sweep->add_option("--out", sweep_args.out_path, "output report JSON")->required();

    AblationArgs ablation_args;
    CLI::App* ablation =
        app.add_subcommand("ablation", "photo-only vs photo+social across synthetic seeds");
    ablation->add_option("--config", ablation_args.config_path, "pipeline config JSON");
    ablation->add_option("--out", ablation_args.out_path, "output summary JSON")->required();

    PprArgs ppr_args;
    CLI::App* ppr = app.add_subcommand("ppr", "top-k personalized PageRank from a photo node");
    ppr->add_option("--photos", ppr_args.photos_path, "photo records (JSONL)")->required();
    ppr->add_option("--interactions", ppr_args.interactions_path, "interaction records (JSONL)")
        ->required();
    ppr->add_option("--config", ppr_args.config_path, "pipeline config JSON");
    ppr->add_option("--photo-id", ppr_args.photo_id, "source photo id")->required();
    ppr->add_option("--top-k", ppr_args.top_k, "number of entries to print");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (train->parsed()) return cmd_train(train_args);
        if (cluster->parsed()) return cmd_cluster(cluster_args);
        if (evaluate->parsed()) return cmd_evaluate(evaluate_args);
        if (sweep->parsed()) return cmd_sweep(sweep_args);
        if (ablation->parsed()) return cmd_ablation(ablation_args);
        if (ppr->parsed()) return cmd_ppr(ppr_args);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "evdet: " << e.what() << "\n\n" << app.help() << std::flush;
        return 2;
    } catch (const std::exception& e) {
        std::string active = "evdet";
        for (CLI::App* sub : app.get_subcommands()) active = sub->get_name();
        std::cerr << "evdet " << active << ": " << e.what() << "\n";
        return 1;
    }
}
