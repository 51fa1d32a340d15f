#include "evdet/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <unordered_set>

#include "evdet/io_util.hpp"
#include "json.hpp"

namespace evdet {

using nlohmann::json;

void SamplingConfig::validate() const {
    if (!(max_neg_pos_ratio > 0.0 && max_neg_pos_ratio <= 5.0)) {
        throw std::runtime_error("sampling config: max_neg_pos_ratio must be in (0,5]");
    }
    if (max_positive_pairs < 1) {
        throw std::runtime_error("sampling config: max_positive_pairs must be >= 1");
    }
}

void TrainConfig::validate() const {
    if (!(lambda > 0.0)) throw std::runtime_error("training config: lambda must be > 0");
    if (epochs < 1) throw std::runtime_error("training config: epochs must be >= 1");
}

const char* to_string(Calibration calibration) {
    return calibration == Calibration::Logistic ? "logistic" : "identity";
}

Calibration calibration_from_string(const std::string& s) {
    if (s == "logistic") return Calibration::Logistic;
    if (s == "identity") return Calibration::Identity;
    throw std::runtime_error("unknown calibration '" + s + "'");
}

namespace {

TrainingPair make_pair(const std::string& a, const std::string& b, int label) {
    TrainingPair pair;
    if (a < b) {
        pair.photo_id_i = a;
        pair.photo_id_j = b;
    } else {
        pair.photo_id_i = b;
        pair.photo_id_j = a;
    }
    pair.label = label;
    return pair;
}

}  // namespace

std::vector<TrainingPair> sample_pairs(const PhotoCollection& photos,
                                       const SamplingConfig& config) {
    config.validate();

    // Labeled photos in a canonical order: by event, then photo_id.
    std::map<std::string, std::vector<std::string>> by_event;
    for (const Photo& p : photos.photos()) {
        if (p.event_id) by_event[*p.event_id].push_back(p.photo_id);
    }
    std::vector<std::string> ids;
    std::vector<std::size_t> event_of;
    std::size_t event_index = 0;
    for (auto& [event, members] : by_event) {
        std::sort(members.begin(), members.end());
        for (auto& id : members) {
            ids.push_back(id);
            event_of.push_back(event_index);
        }
        ++event_index;
    }

    std::vector<TrainingPair> positives;
    for (const auto& [event, members] : by_event) {
        for (std::size_t i = 0; i < members.size(); ++i) {
            for (std::size_t j = i + 1; j < members.size(); ++j) {
                positives.push_back(make_pair(members[i], members[j], +1));
            }
        }
    }
    if (positives.empty()) throw std::runtime_error("no positive training pairs");

    std::mt19937_64 rng(config.seed);
    if (positives.size() > config.max_positive_pairs) {
        std::vector<TrainingPair> kept;
        kept.reserve(config.max_positive_pairs);
        std::sample(positives.begin(), positives.end(), std::back_inserter(kept),
                    config.max_positive_pairs, rng);
        positives = std::move(kept);
    }

    const std::size_t m = ids.size();
    std::size_t cross_total = m * (m - 1) / 2;
    for (const auto& [event, members] : by_event) {
        cross_total -= members.size() * (members.size() - 1) / 2;
    }
    const auto target =
        static_cast<std::size_t>(config.max_neg_pos_ratio * static_cast<double>(positives.size()));

    std::vector<TrainingPair> negatives;
    if (cross_total <= target) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (event_of[i] != event_of[j]) negatives.push_back(make_pair(ids[i], ids[j], -1));
            }
        }
    } else if (cross_total <= 4 * target) {
        // Dense regime: enumerate, shuffle, truncate.
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j) {
                if (event_of[i] != event_of[j]) negatives.push_back(make_pair(ids[i], ids[j], -1));
            }
        }
        std::shuffle(negatives.begin(), negatives.end(), rng);
        negatives.resize(target);
    } else {
        // Sparse regime: rejection sampling with deduplication.
        std::unordered_set<std::uint64_t> seen;
        std::uniform_int_distribution<std::size_t> pick(0, m - 1);
        while (negatives.size() < target) {
            std::size_t i = pick(rng);
            std::size_t j = pick(rng);
            if (i == j || event_of[i] == event_of[j]) continue;
            std::uint64_t key = static_cast<std::uint64_t>(std::min(i, j)) * m + std::max(i, j);
            if (!seen.insert(key).second) continue;
            negatives.push_back(make_pair(ids[i], ids[j], -1));
        }
    }

    std::vector<TrainingPair> pairs = std::move(positives);
    pairs.insert(pairs.end(), std::make_move_iterator(negatives.begin()),
                 std::make_move_iterator(negatives.end()));
    return pairs;
}

Standardization fit_standardization(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::runtime_error("fit_standardization: no rows");
    const std::size_t d = rows.front().size();
    Standardization stats;
    stats.means.assign(d, 0.0);
    stats.stds.assign(d, 0.0);
    for (const auto& row : rows) {
        if (row.size() != d) throw std::runtime_error("fit_standardization: ragged rows");
        for (std::size_t k = 0; k < d; ++k) stats.means[k] += row[k];
    }
    for (double& mean : stats.means) mean /= static_cast<double>(rows.size());
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < d; ++k) {
            double delta = row[k] - stats.means[k];
            stats.stds[k] += delta * delta;
        }
    }
    for (double& s : stats.stds) s = std::sqrt(s / static_cast<double>(rows.size()));
    return stats;
}

std::vector<double> standardize(std::span<const double> x, const Standardization& stats) {
    if (x.size() != stats.means.size()) {
        throw std::runtime_error("standardize: feature count mismatch");
    }
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        z[k] = stats.stds[k] == 0.0 ? 0.0 : (x[k] - stats.means[k]) / stats.stds[k];
    }
    return z;
}

double svm_objective(std::span<const double> weights, double bias, double lambda,
                     const std::vector<std::vector<double>>& rows, std::span<const int> labels) {
    double norm2 = 0.0;
    for (double w : weights) norm2 += w * w;
    double hinge = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double margin = bias;
        for (std::size_t k = 0; k < weights.size(); ++k) margin += weights[k] * rows[i][k];
        hinge += std::max(0.0, 1.0 - labels[i] * margin);
    }
    return 0.5 * lambda * norm2 + hinge / static_cast<double>(rows.size());
}

SimilarityModel train(const std::vector<TrainingPair>& pairs,
                      const std::vector<std::string>& names, const TrainConfig& config,
                      const std::string& config_digest) {
    config.validate();
    if (pairs.empty()) throw std::runtime_error("train: no training pairs");
    bool has_pos = false, has_neg = false;
    for (const auto& p : pairs) {
        if (p.label > 0) has_pos = true;
        if (p.label < 0) has_neg = true;
    }
    if (!has_pos || !has_neg) throw std::runtime_error("degenerate training labels");

    const std::size_t n = pairs.size();
    const std::size_t d = names.size();
    std::vector<std::vector<double>> raw(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        raw[i] = feature_values(pairs[i].features, names);
        labels[i] = pairs[i].label;
    }
    Standardization stats = fit_standardization(raw);
    std::vector<std::vector<double>> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = standardize(raw[i], stats);

    std::vector<double> w(d, 0.0);
    double b = 0.0;
    // Best-iterate tracking keeps the returned objective at or below the
    // zero model's objective of exactly 1.0.
    std::vector<double> best_w = w;
    double best_b = b;
    double best_obj = svm_objective(w, b, config.lambda, rows, labels);

    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    std::uint64_t t = 1;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t idx : order) {
            const auto& z = rows[idx];
            const int y = labels[idx];
            const double eta = 1.0 / (config.lambda * static_cast<double>(t));
            double margin = b;
            for (std::size_t k = 0; k < d; ++k) margin += w[k] * z[k];
            const double shrink = 1.0 - eta * config.lambda;
            if (y * margin < 1.0) {
                for (std::size_t k = 0; k < d; ++k) w[k] = shrink * w[k] + eta * y * z[k];
                // The 1/(lambda t) rate is derived from the regularizer's
                // curvature, which the unregularized bias does not have; a
                // plain 1/t step keeps the first updates bounded.
                b += y / static_cast<double>(t);
            } else {
                for (std::size_t k = 0; k < d; ++k) w[k] *= shrink;
            }
            ++t;
        }
        double obj = svm_objective(w, b, config.lambda, rows, labels);
        if (obj < best_obj) {
            best_obj = obj;
            best_w = w;
            best_b = b;
        }
    }

    SimilarityModel model;
    model.feature_names = names;
    model.weights = std::move(best_w);
    model.bias = best_b;
    model.means = std::move(stats.means);
    model.stds = std::move(stats.stds);
    model.lambda = config.lambda;
    model.epochs = config.epochs;
    model.seed = config.seed;
    model.calibration = config.calibration;
    model.config_digest = config_digest;
    return model;
}

double SimilarityModel::margin_values(std::span<const double> values) const {
    if (values.size() != weights.size()) {
        throw std::runtime_error("score: feature count mismatch (expected " +
                                 std::to_string(weights.size()) + ", got " +
                                 std::to_string(values.size()) + ")");
    }
    Standardization stats{means, stds};
    std::vector<double> z = standardize(values, stats);
    double margin = bias;
    for (std::size_t k = 0; k < weights.size(); ++k) margin += weights[k] * z[k];
    return margin;
}

double SimilarityModel::margin(const FeatureVector& fv) const {
    return margin_values(feature_values(fv, feature_names));
}

double SimilarityModel::theta_values(std::span<const double> values) const {
    double m = margin_values(values);
    return calibration == Calibration::Logistic ? 1.0 / (1.0 + std::exp(-m)) : m;
}

double SimilarityModel::theta(const FeatureVector& fv) const {
    return theta_values(feature_values(fv, feature_names));
}

std::string SimilarityModel::to_json_string() const {
    json obj;
    obj["feature_names"] = feature_names;
    obj["weights"] = weights;
    obj["bias"] = bias;
    obj["means"] = means;
    obj["stds"] = stds;
    obj["lambda"] = lambda;
    obj["epochs"] = epochs;
    obj["seed"] = seed;
    obj["calibration"] = to_string(calibration);
    obj["config_digest"] = config_digest;
    return obj.dump(2) + "\n";
}

SimilarityModel SimilarityModel::from_json_string(const std::string& text) {
    SimilarityModel model;
    try {
        json obj = json::parse(text);
        model.feature_names = obj.at("feature_names").get<std::vector<std::string>>();
        model.weights = obj.at("weights").get<std::vector<double>>();
        model.bias = obj.at("bias").get<double>();
        model.means = obj.at("means").get<std::vector<double>>();
        model.stds = obj.at("stds").get<std::vector<double>>();
        model.lambda = obj.at("lambda").get<double>();
        model.epochs = obj.at("epochs").get<int>();
        model.seed = obj.at("seed").get<std::uint64_t>();
        model.calibration = calibration_from_string(obj.at("calibration").get<std::string>());
        model.config_digest = obj.at("config_digest").get<std::string>();
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("model JSON: ") + e.what());
    }
    if (model.weights.size() != model.feature_names.size() ||
        model.means.size() != model.feature_names.size() ||
        model.stds.size() != model.feature_names.size()) {
        throw std::runtime_error("model file: weights/means/stds length mismatch");
    }
    for (double s : model.stds) {
        if (s < 0.0) throw std::runtime_error("model file: negative feature std");
    }
    return model;
}

void SimilarityModel::save(const std::filesystem::path& path) const {
    atomic_write_file(path, to_json_string());
}

SimilarityModel SimilarityModel::load(const std::filesystem::path& path) {
    try {
        return from_json_string(read_file_string(path));
    } catch (const json::exception& e) {
        throw std::runtime_error("model file '" + path.string() + "': " + e.what());
    }
}

}  // namespace evdet
