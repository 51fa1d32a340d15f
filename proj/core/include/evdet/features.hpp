#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evdet/records.hpp"

namespace evdet {

/// Decay scales mapping raw time/geo differences into (0,1].
struct FeatureScales {
    double tau_seconds = 86400.0;  // one day
    double sigma_km = 100.0;
};

struct FeatureToggles {
    bool enable_social = true;
    bool enable_owner = false;
};

/// exp(-|t1-t2| / tau). Throws if tau <= 0.
double time_similarity(std::int64_t t1, std::int64_t t2, double tau_seconds);

/// Haversine great-circle distance on a sphere of radius 6371.0088 km.
/// Throws on out-of-range coordinates.
double geo_distance_km(double lat1, double lon1, double lat2, double lon2);

/// exp(-d / sigma). Throws if sigma <= 0.
double geo_similarity(double distance_km, double sigma_km);

/// Lowercases, splits on every non-alphanumeric character (ASCII), drops
/// empties and stopwords.
std::vector<std::string> tokenize(std::string_view text);

/// The fixed built-in English stopword list, sorted.
const std::vector<std::string>& stopword_list();

/// Sparse weighted token vector: (vocabulary index, weight), sorted by index.
using SparseVec = std::vector<std::pair<int, double>>;

/// Vocabulary plus smoothed idf, built from a training corpus.
/// idf(t) = ln((1 + N) / (1 + df(t))) + 1, always > 0.
class TfIdfIndex {
public:
    TfIdfIndex() = default;

    static TfIdfIndex build(const std::vector<std::vector<std::string>>& documents);

    int document_count() const { return document_count_; }
    std::size_t vocabulary_size() const { return vocabulary_.size(); }
    double idf(const std::string& token) const;  // 0 for out-of-vocabulary tokens

    /// tf-idf weights for one document; tf is the raw in-document count.
    /// Out-of-vocabulary tokens are dropped.
    SparseVec weigh(const std::vector<std::string>& tokens) const;

private:
    std::unordered_map<std::string, int> vocabulary_;
    std::vector<double> idf_;
    int document_count_ = 0;
};

/// Standard cosine over non-negative weights; 0 when either vector is all
/// zero. Result is in [0,1].
double cosine_similarity(const SparseVec& a, const SparseVec& b);

/// Per-pair similarity features. Symmetric in the two source photos.
struct FeatureVector {
    double time_sim = 0.0;
    double geo_sim = 0.0;
    double geo_missing = 0.0;  // 1 when either photo lacks coordinates
    double tag_sim = 0.0;
    double text_sim = 0.0;
    double social_affinity = 0.0;  // raw random-walk score, standardized later
    double same_owner = 0.0;

    bool operator==(const FeatureVector&) const = default;
};

/// Ordered feature names for the given toggles. Base names are always
/// time, geo, geo_missing, tags, text.
std::vector<std::string> feature_names(const FeatureToggles& toggles);

/// Projects a FeatureVector onto the named columns, in order. Throws on an
/// unknown name.
std::vector<double> feature_values(const FeatureVector& fv, const std::vector<std::string>& names);

/// Photo-pair social affinity by id, supplied by the social graph.
using SocialAffinityFn = std::function<double(const std::string&, const std::string&)>;

/// Assembles pair feature vectors for photos of one collection. Builds the
/// tag and text tf-idf indices from that collection up front; immutable
/// afterwards, so evaluation is safe in parallel across pairs.
class PairFeatureExtractor {
public:
    PairFeatureExtractor(const PhotoCollection& photos, FeatureScales scales,
                         FeatureToggles toggles, SocialAffinityFn social = nullptr);

    FeatureVector features(const Photo& a, const Photo& b) const;

    const TfIdfIndex& tag_index() const { return tag_index_; }
    const TfIdfIndex& text_index() const { return text_index_; }

private:
    const SparseVec& tag_vector(const std::string& photo_id) const;
    const SparseVec& text_vector(const std::string& photo_id) const;

    FeatureScales scales_;
    FeatureToggles toggles_;
    SocialAffinityFn social_;
    TfIdfIndex tag_index_;
    TfIdfIndex text_index_;
    std::unordered_map<std::string, SparseVec> tag_vectors_;
    std::unordered_map<std::string, SparseVec> text_vectors_;
};

}  // namespace evdet
