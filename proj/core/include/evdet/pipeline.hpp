#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "evdet/clustering.hpp"
#include "evdet/features.hpp"
#include "evdet/metrics.hpp"
#include "evdet/records.hpp"
#include "evdet/similarity.hpp"
#include "evdet/social_graph.hpp"
#include "evdet/synth.hpp"

namespace evdet {

/// Effective settings for one pipeline run. Loaded from a single JSON config
/// file; every field has a default, so a missing file section falls back to
/// the values below. Flag overrides happen in the CLI layer.
struct PipelineConfig {
    FeatureScales scales;
    FeatureToggles toggles;
    GraphConfig graph;
    SamplingConfig sampling;
    TrainConfig training;
    StreamOrderKey stream_order = StreamOrderKey::UploadTime;

    double mu = 0.5;
    double mu_min = 0.05;
    double mu_max = 0.95;
    double mu_step = 0.05;
    std::int64_t cluster_window_seconds = 0;

    SynthConfig synth;
    std::vector<std::uint64_t> ablation_seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

    std::string to_json_string() const;
    static PipelineConfig from_json_string(const std::string& text);
    static PipelineConfig load(const std::filesystem::path& path);

    std::vector<double> mu_grid() const;
    ClusterOptions cluster_options() const { return ClusterOptions{cluster_window_seconds}; }
};

/// Digest over the part of the config a scoring run must share with the
/// training run: feature scales, graph parameters, stream order and the
/// stopword list. Sampling and training settings are excluded (the model
/// file records them as plain fields), as are the mu grid and synth block,
/// so re-clustering with a different threshold still matches the digest
/// recorded at training time. Feature toggles are excluded too: the model's
/// feature_names record which features it uses and scoring follows them.
std::string config_digest(const PipelineConfig& config);

/// Owns the social graph, the PPR cache and the feature extractor for one
/// photo collection.
class FeaturePipeline {
public:
    FeaturePipeline(const PhotoCollection& photos, const InteractionLog& interactions,
                    const PipelineConfig& config, FeatureToggles toggles);

    FeatureVector features(const Photo& a, const Photo& b) const;
    PairSimilarityFn theta_fn(const SimilarityModel& model) const;

    const SocialGraph* graph() const { return graph_.get(); }

private:
    std::unique_ptr<SocialGraph> graph_;
    std::unique_ptr<PprCache> ppr_cache_;
    std::unique_ptr<PairFeatureExtractor> extractor_;
};

/// Feature toggles implied by a trained model's feature_names.
FeatureToggles toggles_from_model(const SimilarityModel& model);

/// Throws when the model was trained under a different effective config.
void check_model_digest(const SimilarityModel& model, const PipelineConfig& config);

SimilarityModel run_train(const PhotoCollection& photos, const InteractionLog& interactions,
                          const PipelineConfig& config);

Clustering run_cluster(const PhotoCollection& photos, const InteractionLog& interactions,
                       const SimilarityModel& model, const PipelineConfig& config, double mu);

std::vector<MetricsReport> run_sweep(const PhotoCollection& photos,
                                     const InteractionLog& interactions,
                                     const SimilarityModel& model, const PipelineConfig& config,
                                     const std::vector<double>& mu_values);

/// Best swept value and the threshold it occurred at; ties keep the lowest mu.
struct SweepBest {
    double best_nmi = 0.0;
    double mu_at_best_nmi = 0.0;
    double best_bcubed_f1 = 0.0;
    double mu_at_best_f1 = 0.0;
};
SweepBest sweep_best(const std::vector<MetricsReport>& reports);

/// Photo-only versus photo+social comparison on one dataset: both models are
/// trained on the same sampled pairs and seed, then swept over the same mu
/// grid.
struct AblationResult {
    std::vector<MetricsReport> photo_only_reports;
    std::vector<MetricsReport> with_social_reports;
    SweepBest photo_only;
    SweepBest with_social;
    double delta_nmi = 0.0;
    double delta_bcubed_f1 = 0.0;
};
AblationResult run_ablation_single(const PhotoCollection& photos,
                                   const InteractionLog& interactions,
                                   const PipelineConfig& config);
std::string ablation_result_to_json_string(const AblationResult& result);

/// Multi-seed ablation harness: generates one synthetic dataset per seed in
/// config.ablation_seeds and averages the per-seed results. Returns the
/// report as a JSON string.
struct AblationSummary {
    std::vector<AblationResult> per_seed;
    std::vector<std::uint64_t> seeds;
    double mean_photo_only_nmi = 0.0;
    double mean_with_social_nmi = 0.0;
    double mean_delta_nmi = 0.0;
    double mean_delta_bcubed_f1 = 0.0;
};
AblationSummary run_ablation(const PipelineConfig& config);
std::string ablation_summary_to_json_string(const AblationSummary& summary);

/// Top-k PPR entries from a photo node: (node type, label, score), sorted by
/// descending score. Entries with zero mass are omitted.
struct PprEntry {
    NodeType type;
    std::string label;
    double score;
};
std::vector<PprEntry> run_ppr_topk(const PhotoCollection& photos,
                                   const InteractionLog& interactions,
                                   const PipelineConfig& config, const std::string& photo_id,
                                   int top_k);

}  // namespace evdet
