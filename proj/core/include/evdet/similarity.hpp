#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "evdet/features.hpp"
#include "evdet/records.hpp"

namespace evdet {

/// One labeled photo pair. photo_id_i < photo_id_j; label +1 for same event,
/// -1 for different events. Features are filled in by the pipeline after
/// sampling.
struct TrainingPair {
    std::string photo_id_i;
    std::string photo_id_j;
    FeatureVector features;
    int label = 0;
};

struct SamplingConfig {
    double max_neg_pos_ratio = 5.0;  // hard cap: validate() rejects values > 5
    std::size_t max_positive_pairs = 50000;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Positives are all within-event pairs (subsampled uniformly past the cap);
/// negatives are uniform random cross-event pairs with count at most
/// max_neg_pos_ratio times the positives. Photos without ground truth are
/// ignored. Deterministic per seed; no duplicate pairs. Throws when no
/// positive pair exists.
std::vector<TrainingPair> sample_pairs(const PhotoCollection& photos, const SamplingConfig& config);

struct Standardization {
    std::vector<double> means;
    std::vector<double> stds;  // population standard deviation
};

/// Per-column mean and population std over the given rows. Rows must be
/// non-empty and rectangular.
Standardization fit_standardization(const std::vector<std::vector<double>>& rows);

/// (x - mean) / std per column; columns with std = 0 map to 0.
std::vector<double> standardize(std::span<const double> x, const Standardization& stats);

enum class Calibration { Logistic, Identity };

const char* to_string(Calibration calibration);
Calibration calibration_from_string(const std::string& s);

struct TrainConfig {
    double lambda = 1e-3;
    int epochs = 20;
    std::uint64_t seed = 0;
    Calibration calibration = Calibration::Logistic;

    void validate() const;
};

/// Linear weights, bias and the training-time feature statistics behind the
/// pairwise similarity theta.
struct SimilarityModel {
    std::vector<std::string> feature_names;
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<double> means;
    std::vector<double> stds;
    double lambda = 1e-3;
    int epochs = 20;
    std::uint64_t seed = 0;
    Calibration calibration = Calibration::Logistic;
    std::string config_digest;

    /// w . standardize(x) + bias for a raw (unstandardized) value row.
    /// Throws on a feature-count mismatch.
    double margin_values(std::span<const double> values) const;
    double margin(const FeatureVector& fv) const;

    /// Calibrated similarity: logistic 1/(1+exp(-margin)) in (0,1), or the
    /// raw margin in identity mode.
    double theta_values(std::span<const double> values) const;
    double theta(const FeatureVector& fv) const;

    std::string to_json_string() const;
    static SimilarityModel from_json_string(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static SimilarityModel load(const std::filesystem::path& path);

    bool operator==(const SimilarityModel&) const = default;
};

/// Regularized SVM objective: lambda/2 ||w||^2 + mean hinge loss. The bias
/// is unregularized. Rows are standardized feature rows.
double svm_objective(std::span<const double> weights, double bias, double lambda,
                     const std::vector<std::vector<double>>& rows, std::span<const int> labels);

/// Trains the linear SVM by seeded stochastic subgradient descent with step
/// 1/(lambda t) over shuffled pairs; the unregularized bias moves at 1/t.
/// Keeps the best epoch-end iterate by objective, starting from the zero
/// model, so the returned objective never exceeds 1.0. Throws when the pairs
/// carry only one label.
SimilarityModel train(const std::vector<TrainingPair>& pairs,
                      const std::vector<std::string>& names, const TrainConfig& config,
                      const std::string& config_digest);

}  // namespace evdet
