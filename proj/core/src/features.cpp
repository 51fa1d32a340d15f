#include "evdet/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

namespace evdet {

double time_similarity(std::int64_t t1, std::int64_t t2, double tau_seconds) {
    if (!(tau_seconds > 0.0)) {
        throw std::runtime_error("time_similarity: tau must be > 0");
    }
    double dt = std::abs(static_cast<double>(t1 - t2));
    return std::exp(-dt / tau_seconds);
}

namespace {

constexpr double kEarthRadiusKm = 6371.0088;

double to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

}  // namespace

double geo_distance_km(double lat1, double lon1, double lat2, double lon2) {
    if (lat1 < -90.0 || lat1 > 90.0 || lat2 < -90.0 || lat2 > 90.0) {
        throw std::runtime_error("geo_distance_km: latitude out of range [-90,90]");
    }
    if (lon1 < -180.0 || lon1 > 180.0 || lon2 < -180.0 || lon2 > 180.0) {
        throw std::runtime_error("geo_distance_km: longitude out of range [-180,180]");
    }
    double dlat = to_rad(lat2 - lat1);
    double dlon = to_rad(lon2 - lon1);
    double s1 = std::sin(dlat / 2.0);
    double s2 = std::sin(dlon / 2.0);
    double a = s1 * s1 + std::cos(to_rad(lat1)) * std::cos(to_rad(lat2)) * s2 * s2;
    a = std::clamp(a, 0.0, 1.0);
    return kEarthRadiusKm * 2.0 * std::atan2(std::sqrt(a), std::sqrt(1.0 - a));
}

double geo_similarity(double distance_km, double sigma_km) {
    if (!(sigma_km > 0.0)) {
        throw std::runtime_error("geo_similarity: sigma must be > 0");
    }
    if (distance_km < 0.0) {
        throw std::runtime_error("geo_similarity: distance must be >= 0");
    }
    return std::exp(-distance_km / sigma_km);
}

const std::vector<std::string>& stopword_list() {
    static const std::vector<std::string> kStopwords = {
        "a",    "about", "an",   "and",  "are",  "as",   "at",    "be",    "been",  "but",
        "by",   "can",   "could", "did",  "do",   "does", "for",   "from",  "had",   "has",
        "have", "he",    "her",  "his",  "i",    "if",   "in",    "is",    "it",    "its",
        "me",   "my",    "no",   "not",  "of",   "on",   "or",    "our",   "she",   "so",
        "that", "the",   "their", "them", "then", "these", "they",  "this",  "those", "to",
        "us",   "was",   "we",   "were", "will", "with", "would", "you",   "your"};
    return kStopwords;
}

std::vector<std::string> tokenize(std::string_view text) {
    static const std::unordered_set<std::string> stop(stopword_list().begin(),
                                                      stopword_list().end());
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && !stop.contains(current)) tokens.push_back(current);
        current.clear();
    };
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

TfIdfIndex TfIdfIndex::build(const std::vector<std::vector<std::string>>& documents) {
    TfIdfIndex index;
    index.document_count_ = static_cast<int>(documents.size());
    // Document frequency over a deterministic (sorted) vocabulary.
    std::map<std::string, int> df;
    for (const auto& doc : documents) {
        std::unordered_set<std::string_view> seen;
        for (const auto& token : doc) {
            if (seen.insert(token).second) ++df[token];
        }
    }
    index.idf_.reserve(df.size());
    int next = 0;
    for (const auto& [token, count] : df) {
        index.vocabulary_.emplace(token, next++);
        index.idf_.push_back(std::log((1.0 + index.document_count_) / (1.0 + count)) + 1.0);
    }
    return index;
}

double TfIdfIndex::idf(const std::string& token) const {
    auto it = vocabulary_.find(token);
    return it == vocabulary_.end() ? 0.0 : idf_[static_cast<std::size_t>(it->second)];
}

SparseVec TfIdfIndex::weigh(const std::vector<std::string>& tokens) const {
    std::map<int, int> counts;
    for (const auto& token : tokens) {
        auto it = vocabulary_.find(token);
        if (it != vocabulary_.end()) ++counts[it->second];
    }
    SparseVec vec;
    vec.reserve(counts.size());
    for (const auto& [idx, tf] : counts) {
        vec.emplace_back(idx, tf * idf_[static_cast<std::size_t>(idx)]);
    }
    return vec;
}

double cosine_similarity(const SparseVec& a, const SparseVec& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    auto ia = a.begin(), ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (ia->first < ib->first) {
            na += ia->second * ia->second;
            ++ia;
        } else if (ib->first < ia->first) {
            nb += ib->second * ib->second;
            ++ib;
        } else {
            dot += ia->second * ib->second;
            na += ia->second * ia->second;
            nb += ib->second * ib->second;
            ++ia;
            ++ib;
        }
    }
    for (; ia != a.end(); ++ia) na += ia->second * ia->second;
    for (; ib != b.end(); ++ib) nb += ib->second * ib->second;
    if (na == 0.0 || nb == 0.0) return 0.0;
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

std::vector<std::string> feature_names(const FeatureToggles& toggles) {
    std::vector<std::string> names = {"time", "geo", "geo_missing", "tags", "text"};
    if (toggles.enable_social) names.push_back("social");
    if (toggles.enable_owner) names.push_back("owner");
    return names;
}

std::vector<double> feature_values(const FeatureVector& fv, const std::vector<std::string>& names) {
    std::vector<double> values;
    values.reserve(names.size());
    for (const auto& name : names) {
        if (name == "time") values.push_back(fv.time_sim);
        else if (name == "geo") values.push_back(fv.geo_sim);
        else if (name == "geo_missing") values.push_back(fv.geo_missing);
        else if (name == "tags") values.push_back(fv.tag_sim);
        else if (name == "text") values.push_back(fv.text_sim);
        else if (name == "social") values.push_back(fv.social_affinity);
        else if (name == "owner") values.push_back(fv.same_owner);
        else throw std::runtime_error("unknown feature name '" + name + "'");
    }
    return values;
}

namespace {

std::vector<std::string> text_tokens(const Photo& p) {
    std::string text;
    if (p.title) text += *p.title;
    if (p.description) {
        if (!text.empty()) text += ' ';
        text += *p.description;
    }
    return tokenize(text);
}

}  // namespace

PairFeatureExtractor::PairFeatureExtractor(const PhotoCollection& photos, FeatureScales scales,
                                           FeatureToggles toggles, SocialAffinityFn social)
    : scales_(scales), toggles_(toggles), social_(std::move(social)) {
    if (!(scales_.tau_seconds > 0.0)) throw std::runtime_error("feature config: tau must be > 0");
    if (!(scales_.sigma_km > 0.0)) throw std::runtime_error("feature config: sigma must be > 0");
    std::vector<std::vector<std::string>> tag_docs, text_docs;
    tag_docs.reserve(photos.size());
    text_docs.reserve(photos.size());
    for (const Photo& p : photos.photos()) {
        tag_docs.push_back(p.tags);
        text_docs.push_back(text_tokens(p));
    }
    tag_index_ = TfIdfIndex::build(tag_docs);
    text_index_ = TfIdfIndex::build(text_docs);
    std::size_t i = 0;
    for (const Photo& p : photos.photos()) {
        tag_vectors_.emplace(p.photo_id, tag_index_.weigh(tag_docs[i]));
        text_vectors_.emplace(p.photo_id, text_index_.weigh(text_docs[i]));
        ++i;
    }
}

const SparseVec& PairFeatureExtractor::tag_vector(const std::string& photo_id) const {
    auto it = tag_vectors_.find(photo_id);
    if (it == tag_vectors_.end()) {
        throw std::runtime_error("photo '" + photo_id + "' is not part of the feature corpus");
    }
    return it->second;
}

const SparseVec& PairFeatureExtractor::text_vector(const std::string& photo_id) const {
    auto it = text_vectors_.find(photo_id);
    if (it == text_vectors_.end()) {
        throw std::runtime_error("photo '" + photo_id + "' is not part of the feature corpus");
    }
    return it->second;
}

FeatureVector PairFeatureExtractor::features(const Photo& a, const Photo& b) const {
    FeatureVector fv;
    fv.time_sim = time_similarity(a.taken_time, b.taken_time, scales_.tau_seconds);
    if (a.has_location() && b.has_location()) {
        double d = geo_distance_km(*a.latitude, *a.longitude, *b.latitude, *b.longitude);
        fv.geo_sim = geo_similarity(d, scales_.sigma_km);
        fv.geo_missing = 0.0;
    } else {
        fv.geo_sim = 0.0;
        fv.geo_missing = 1.0;
    }
    fv.tag_sim = cosine_similarity(tag_vector(a.photo_id), tag_vector(b.photo_id));
    fv.text_sim = cosine_similarity(text_vector(a.photo_id), text_vector(b.photo_id));
    if (toggles_.enable_social && social_) {
        fv.social_affinity = social_(a.photo_id, b.photo_id);
    }
    if (toggles_.enable_owner) {
        fv.same_owner = a.user_id == b.user_id ? 1.0 : 0.0;
    }
    return fv;
}

}  // namespace evdet
