#include "evdet/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "evdet/io_util.hpp"
#include "json.hpp"

namespace evdet {

using nlohmann::json;

namespace {

const char* to_string(StreamOrderKey key) {
    return key == StreamOrderKey::UploadTime ? "upload" : "taken";
}

StreamOrderKey stream_order_from_string(const std::string& s) {
    if (s == "upload") return StreamOrderKey::UploadTime;
    if (s == "taken") return StreamOrderKey::TakenTime;
    throw std::runtime_error("config: stream_order must be 'upload' or 'taken'");
}

json features_to_json(const FeatureScales& scales, const FeatureToggles& toggles) {
    json obj;
    obj["tau_seconds"] = scales.tau_seconds;
    obj["sigma_km"] = scales.sigma_km;
    obj["enable_social"] = toggles.enable_social;
    obj["enable_owner"] = toggles.enable_owner;
    return obj;
}

json graph_to_json(const GraphConfig& g) {
    json obj;
    obj["alpha"] = g.alpha;
    obj["tol"] = g.tol;
    obj["max_iter"] = g.max_iter;
    obj["w_auth"] = g.w_auth;
    obj["w_comment"] = g.w_comment;
    obj["w_favorite"] = g.w_favorite;
    obj["w_tag"] = g.w_tag;
    return obj;
}

json sampling_to_json(const SamplingConfig& s) {
    json obj;
    obj["max_neg_pos_ratio"] = s.max_neg_pos_ratio;
    obj["max_positive_pairs"] = s.max_positive_pairs;
    obj["seed"] = s.seed;
    return obj;
}

json training_to_json(const TrainConfig& t) {
    json obj;
    obj["lambda"] = t.lambda;
    obj["epochs"] = t.epochs;
    obj["seed"] = t.seed;
    obj["calibration"] = to_string(t.calibration);
    return obj;
}

}  // namespace

std::string PipelineConfig::to_json_string() const {
    json obj;
    obj["features"] = features_to_json(scales, toggles);
    obj["graph"] = graph_to_json(graph);
    obj["sampling"] = sampling_to_json(sampling);
    obj["training"] = training_to_json(training);
    obj["stream_order"] = to_string(stream_order);
    obj["clustering"] = {{"mu", mu},
                         {"mu_min", mu_min},
                         {"mu_max", mu_max},
                         {"mu_step", mu_step},
                         {"window_seconds", cluster_window_seconds}};
    obj["synth"] = json::parse(synth.to_json_string());
    obj["ablation"] = {{"seeds", ablation_seeds}};
    return obj.dump(2) + "\n";
}

PipelineConfig PipelineConfig::from_json_string(const std::string& text) {
    json obj = json::parse(text);
    if (!obj.is_object()) throw std::runtime_error("config: top level must be a JSON object");
    for (const auto& item : obj.items()) {
        static const char* known[] = {"features", "graph",  "sampling", "training",
                                      "stream_order", "clustering", "synth", "ablation"};
        if (std::find(std::begin(known), std::end(known), item.key()) == std::end(known)) {
            throw std::runtime_error("config: unknown section '" + item.key() + "'");
        }
    }
    PipelineConfig c;
    if (obj.contains("features")) {
        const json& f = obj["features"];
        c.scales.tau_seconds = f.value("tau_seconds", c.scales.tau_seconds);
        c.scales.sigma_km = f.value("sigma_km", c.scales.sigma_km);
        c.toggles.enable_social = f.value("enable_social", c.toggles.enable_social);
        c.toggles.enable_owner = f.value("enable_owner", c.toggles.enable_owner);
    }
    if (obj.contains("graph")) {
        const json& g = obj["graph"];
        c.graph.alpha = g.value("alpha", c.graph.alpha);
        c.graph.tol = g.value("tol", c.graph.tol);
        c.graph.max_iter = g.value("max_iter", c.graph.max_iter);
        c.graph.w_auth = g.value("w_auth", c.graph.w_auth);
        c.graph.w_comment = g.value("w_comment", c.graph.w_comment);
        c.graph.w_favorite = g.value("w_favorite", c.graph.w_favorite);
        c.graph.w_tag = g.value("w_tag", c.graph.w_tag);
    }
    if (obj.contains("sampling")) {
        const json& s = obj["sampling"];
        c.sampling.max_neg_pos_ratio = s.value("max_neg_pos_ratio", c.sampling.max_neg_pos_ratio);
        c.sampling.max_positive_pairs = s.value("max_positive_pairs", c.sampling.max_positive_pairs);
        c.sampling.seed = s.value("seed", c.sampling.seed);
    }
    if (obj.contains("training")) {
        const json& t = obj["training"];
        c.training.lambda = t.value("lambda", c.training.lambda);
        c.training.epochs = t.value("epochs", c.training.epochs);
        c.training.seed = t.value("seed", c.training.seed);
        if (t.contains("calibration")) {
            c.training.calibration = calibration_from_string(t["calibration"].get<std::string>());
        }
    }
    if (obj.contains("stream_order")) {
        c.stream_order = stream_order_from_string(obj["stream_order"].get<std::string>());
    }
    if (obj.contains("clustering")) {
        const json& cl = obj["clustering"];
        c.mu = cl.value("mu", c.mu);
        c.mu_min = cl.value("mu_min", c.mu_min);
        c.mu_max = cl.value("mu_max", c.mu_max);
        c.mu_step = cl.value("mu_step", c.mu_step);
        c.cluster_window_seconds = cl.value("window_seconds", c.cluster_window_seconds);
    }
    if (obj.contains("synth")) {
        c.synth = SynthConfig::from_json_string(obj["synth"].dump());
    }
    if (obj.contains("ablation")) {
        const json& a = obj["ablation"];
        if (a.contains("seeds")) {
            c.ablation_seeds = a["seeds"].get<std::vector<std::uint64_t>>();
        }
    }
    c.graph.validate();
    c.sampling.validate();
    c.training.validate();
    if (!(c.scales.tau_seconds > 0.0)) throw std::runtime_error("config: tau_seconds must be > 0");
    if (!(c.scales.sigma_km > 0.0)) throw std::runtime_error("config: sigma_km must be > 0");
    if (!(c.mu_step > 0.0)) throw std::runtime_error("config: mu_step must be > 0");
    return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
    try {
        return from_json_string(read_file_string(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("config file '" + path.string() + "': " + e.what());
    }
}

std::vector<double> PipelineConfig::mu_grid() const {
    std::vector<double> grid;
    for (int k = 0;; ++k) {
        double value = mu_min + k * mu_step;
        if (value > mu_max + 1e-12) break;
        grid.push_back(value);
    }
    return grid;
}

std::string config_digest(const PipelineConfig& config) {
    // Covers exactly the settings a scoring run must share with the training
    // run. Sampling and training parameters are excluded: they shape the
    // fitted weights but not how a finished model is applied, and the model
    // file already records them as plain fields. Feature toggles are also
    // excluded: the model's feature_names are the authoritative record of
    // which features it uses, and scoring derives its toggles from those, so
    // a model trained with a feature disabled pairs cleanly with a config
    // that leaves it on.
    json canon;
    canon["feature_scales"] = {{"tau_seconds", config.scales.tau_seconds},
                               {"sigma_km", config.scales.sigma_km}};
    canon["graph"] = graph_to_json(config.graph);
    canon["stream_order"] = to_string(config.stream_order);
    std::string stopwords;
    for (const auto& w : stopword_list()) {
        stopwords += w;
        stopwords += ',';
    }
    canon["stopwords"] = fnv1a64_hex(stopwords);
    return fnv1a64_hex(canon.dump());
}

FeaturePipeline::FeaturePipeline(const PhotoCollection& photos, const InteractionLog& interactions,
                                 const PipelineConfig& config, FeatureToggles toggles) {
    SocialAffinityFn social;
    if (toggles.enable_social) {
        graph_ = std::make_unique<SocialGraph>(
            SocialGraph::build(photos, interactions, config.graph));
        ppr_cache_ = std::make_unique<PprCache>(*graph_, config.graph);
        social = [this](const std::string& a, const std::string& b) {
            auto na = graph_->photo_node(a);
            auto nb = graph_->photo_node(b);
            if (!na || !nb) {
                throw std::runtime_error("photo '" + (!na ? a : b) + "' is not in the social graph");
            }
            return social_affinity(*ppr_cache_, *na, *nb);
        };
    }
    extractor_ = std::make_unique<PairFeatureExtractor>(photos, config.scales, toggles,
                                                        std::move(social));
}

FeatureVector FeaturePipeline::features(const Photo& a, const Photo& b) const {
    return extractor_->features(a, b);
}

PairSimilarityFn FeaturePipeline::theta_fn(const SimilarityModel& model) const {
    return [this, &model](const Photo& a, const Photo& b) {
        return model.theta(features(a, b));
    };
}

FeatureToggles toggles_from_model(const SimilarityModel& model) {
    FeatureToggles toggles;
    toggles.enable_social = false;
    toggles.enable_owner = false;
    for (const auto& name : model.feature_names) {
        if (name == "social") toggles.enable_social = true;
        if (name == "owner") toggles.enable_owner = true;
    }
    return toggles;
}

void check_model_digest(const SimilarityModel& model, const PipelineConfig& config) {
    std::string expected = config_digest(config);
    if (model.config_digest != expected) {
        throw std::runtime_error(
            "model config digest mismatch (model " + model.config_digest + ", effective config " +
            expected + "): pass the config the model was trained with");
    }
}

SimilarityModel run_train(const PhotoCollection& photos, const InteractionLog& interactions,
                          const PipelineConfig& config) {
    std::vector<TrainingPair> pairs = sample_pairs(photos, config.sampling);
    FeaturePipeline pipeline(photos, interactions, config, config.toggles);
    for (TrainingPair& pair : pairs) {
        const Photo* a = photos.find(pair.photo_id_i);
        const Photo* b = photos.find(pair.photo_id_j);
        pair.features = pipeline.features(*a, *b);
    }
    return train(pairs, feature_names(config.toggles), config.training, config_digest(config));
}

namespace {

/// Clustering wiring shared by run_cluster and run_sweep. The model's
/// feature_names decide which features are computed; the config supplies the
/// scales and graph parameters it was trained under.
struct ScoringSetup {
    ScoringSetup(const PhotoCollection& photos, const InteractionLog& interactions,
                 const SimilarityModel& model, const PipelineConfig& config)
        : pipeline(photos, interactions, config, toggles_from_model(model)),
          stream(order_stream(photos, config.stream_order)),
          theta(pipeline.theta_fn(model)) {}

    FeaturePipeline pipeline;
    PhotoStream stream;
    PairSimilarityFn theta;
};

}  // namespace

Clustering run_cluster(const PhotoCollection& photos, const InteractionLog& interactions,
                       const SimilarityModel& model, const PipelineConfig& config, double mu) {
    check_model_digest(model, config);
    ScoringSetup setup(photos, interactions, model, config);
    return incremental_cluster(setup.stream, setup.theta, mu, config.cluster_options());
}

std::vector<MetricsReport> run_sweep(const PhotoCollection& photos,
                                     const InteractionLog& interactions,
                                     const SimilarityModel& model, const PipelineConfig& config,
                                     const std::vector<double>& mu_values) {
    check_model_digest(model, config);
    ScoringSetup setup(photos, interactions, model, config);
    std::vector<std::string> ids;
    ids.reserve(setup.stream.photos.size());
    for (const Photo& p : setup.stream.photos) ids.push_back(p.photo_id);
    Partition truth = truth_partition(photos, ids);
    return sweep(setup.stream, setup.theta, mu_values, truth, config.cluster_options());
}

SweepBest sweep_best(const std::vector<MetricsReport>& reports) {
    SweepBest best;
    bool first = true;
    for (const auto& r : reports) {
        if (first || r.nmi > best.best_nmi) {
            best.best_nmi = r.nmi;
            best.mu_at_best_nmi = r.mu;
        }
        if (first || r.bcubed_f1 > best.best_bcubed_f1) {
            best.best_bcubed_f1 = r.bcubed_f1;
            best.mu_at_best_f1 = r.mu;
        }
        first = false;
    }
    return best;
}

AblationResult run_ablation_single(const PhotoCollection& photos,
                                   const InteractionLog& interactions,
                                   const PipelineConfig& config) {
    // Same sampled pairs and feature values for both arms; the photo-only
    // model simply trains without the social column.
    std::vector<TrainingPair> pairs = sample_pairs(photos, config.sampling);
    FeatureToggles social_toggles = config.toggles;
    social_toggles.enable_social = true;
    FeatureToggles photo_toggles = config.toggles;
    photo_toggles.enable_social = false;

    FeaturePipeline pipeline(photos, interactions, config, social_toggles);
    for (TrainingPair& pair : pairs) {
        const Photo* a = photos.find(pair.photo_id_i);
        const Photo* b = photos.find(pair.photo_id_j);
        pair.features = pipeline.features(*a, *b);
    }

    PipelineConfig photo_config = config;
    photo_config.toggles = photo_toggles;
    PipelineConfig social_config = config;
    social_config.toggles = social_toggles;

    SimilarityModel photo_model = train(pairs, feature_names(photo_toggles), config.training,
                                        config_digest(photo_config));
    SimilarityModel social_model = train(pairs, feature_names(social_toggles), config.training,
                                         config_digest(social_config));

    PhotoStream stream = order_stream(photos, config.stream_order);
    std::vector<std::string> ids;
    ids.reserve(stream.photos.size());
    for (const Photo& p : stream.photos) ids.push_back(p.photo_id);
    Partition truth = truth_partition(photos, ids);

    std::vector<double> grid = config.mu_grid();
    AblationResult result;
    result.photo_only_reports = sweep(stream, pipeline.theta_fn(photo_model), grid, truth,
                                      config.cluster_options());
    result.with_social_reports = sweep(stream, pipeline.theta_fn(social_model), grid, truth,
                                       config.cluster_options());
    result.photo_only = sweep_best(result.photo_only_reports);
    result.with_social = sweep_best(result.with_social_reports);
    result.delta_nmi = result.with_social.best_nmi - result.photo_only.best_nmi;
    result.delta_bcubed_f1 = result.with_social.best_bcubed_f1 - result.photo_only.best_bcubed_f1;
    return result;
}

namespace {

json sweep_best_to_json(const SweepBest& best) {
    json obj;
    obj["best_nmi"] = best.best_nmi;
    obj["mu_at_best_nmi"] = best.mu_at_best_nmi;
    obj["best_bcubed_f1"] = best.best_bcubed_f1;
    obj["mu_at_best_f1"] = best.mu_at_best_f1;
    return obj;
}

json ablation_result_to_json(const AblationResult& result) {
    json obj;
    obj["photo_only"] = {
        {"sweep", json::parse(reports_to_json_string(result.photo_only_reports))},
        {"best", sweep_best_to_json(result.photo_only)}};
    obj["with_social"] = {
        {"sweep", json::parse(reports_to_json_string(result.with_social_reports))},
        {"best", sweep_best_to_json(result.with_social)}};
    obj["delta_nmi"] = result.delta_nmi;
    obj["delta_bcubed_f1"] = result.delta_bcubed_f1;
    return obj;
}

}  // namespace

std::string ablation_result_to_json_string(const AblationResult& result) {
    return ablation_result_to_json(result).dump(2) + "\n";
}

AblationSummary run_ablation(const PipelineConfig& config) {
    if (config.ablation_seeds.empty()) {
        throw std::runtime_error("ablation: no seeds configured");
    }
    AblationSummary summary;
    summary.seeds = config.ablation_seeds;
    for (std::uint64_t seed : config.ablation_seeds) {
        SynthConfig synth_config = config.synth;
        synth_config.seed = seed;
        SynthDataset dataset = generate(synth_config);
        AblationResult result = run_ablation_single(dataset.photos, dataset.interactions, config);
        summary.mean_photo_only_nmi += result.photo_only.best_nmi;
        summary.mean_with_social_nmi += result.with_social.best_nmi;
        summary.mean_delta_nmi += result.delta_nmi;
        summary.mean_delta_bcubed_f1 += result.delta_bcubed_f1;
        summary.per_seed.push_back(std::move(result));
    }
    const double n = static_cast<double>(summary.per_seed.size());
    summary.mean_photo_only_nmi /= n;
    summary.mean_with_social_nmi /= n;
    summary.mean_delta_nmi /= n;
    summary.mean_delta_bcubed_f1 /= n;
    return summary;
}

std::string ablation_summary_to_json_string(const AblationSummary& summary) {
    json obj;
    json per_seed = json::array();
    for (std::size_t i = 0; i < summary.per_seed.size(); ++i) {
        json entry = ablation_result_to_json(summary.per_seed[i]);
        entry["seed"] = summary.seeds[i];
        per_seed.push_back(std::move(entry));
    }
    obj["per_seed"] = std::move(per_seed);
    obj["mean_photo_only_nmi"] = summary.mean_photo_only_nmi;
    obj["mean_with_social_nmi"] = summary.mean_with_social_nmi;
    obj["mean_delta_nmi"] = summary.mean_delta_nmi;
    obj["mean_delta_bcubed_f1"] = summary.mean_delta_bcubed_f1;
    return obj.dump(2) + "\n";
}

std::vector<PprEntry> run_ppr_topk(const PhotoCollection& photos,
                                   const InteractionLog& interactions,
                                   const PipelineConfig& config, const std::string& photo_id,
                                   int top_k) {
    if (top_k < 1) throw std::runtime_error("ppr: top-k must be >= 1");
    SocialGraph graph = SocialGraph::build(photos, interactions, config.graph);
    auto source = graph.photo_node(photo_id);
    if (!source) throw std::runtime_error("photo '" + photo_id + "' is not in the social graph");
    std::vector<double> v = personalized_pagerank(graph, *source, config.graph);

    std::vector<int> nodes;
    for (int i = 0; i < graph.node_count(); ++i) {
        if (v[static_cast<std::size_t>(i)] > 0.0) nodes.push_back(i);
    }
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
        double va = v[static_cast<std::size_t>(a)];
        double vb = v[static_cast<std::size_t>(b)];
        if (va != vb) return va > vb;
        return a < b;
    });
    if (static_cast<int>(nodes.size()) > top_k) nodes.resize(static_cast<std::size_t>(top_k));

    std::vector<PprEntry> entries;
    entries.reserve(nodes.size());
    for (int node : nodes) {
        entries.push_back({graph.type_of(node), graph.label_of(node),
                           v[static_cast<std::size_t>(node)]});
    }
    return entries;
}

}  // namespace evdet
