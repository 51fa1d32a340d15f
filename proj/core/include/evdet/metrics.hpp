#pragma once

#include <map>
#include <string>
#include <vector>

#include "evdet/clustering.hpp"
#include "evdet/records.hpp"

namespace evdet {

/// item -> cluster label. Two partitions being compared must cover the same
/// item set.
using Partition = std::map<std::string, std::string>;

struct BCubedScore {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

/// Normalized mutual information, 2 I(X;Y) / (H(X) + H(Y)) with natural-log
/// entropies. When both entropies are zero (both partitions a single
/// cluster) the partitions are identical and the score is 1. Throws on an
/// item-set mismatch.
double nmi(const Partition& predicted, const Partition& truth);

/// B-Cubed precision/recall/F1 from the per-item definitions; F1 is the
/// harmonic mean, 0 when either side is 0. Throws on an item-set mismatch.
BCubedScore bcubed(const Partition& predicted, const Partition& truth);

struct MetricsReport {
    double nmi = 0.0;
    double bcubed_precision = 0.0;
    double bcubed_recall = 0.0;
    double bcubed_f1 = 0.0;
    int num_clusters = 0;
    int num_photos = 0;
    double mu = 0.0;

    bool operator==(const MetricsReport&) const = default;
};

std::string report_to_json_string(const MetricsReport& report);
std::string reports_to_json_string(const std::vector<MetricsReport>& reports);

MetricsReport evaluate_partition(const Partition& predicted, const Partition& truth, double mu);

/// Ground-truth partition from photo event_ids. Throws when a requested
/// photo has no event_id or is missing from the collection.
Partition truth_partition(const PhotoCollection& photos, const std::vector<std::string>& ids);

Partition partition_from_clustering(const Clustering& clustering);

/// Clusters the stream once per mu value, scoring each result against the
/// ground truth. Reports come back in the mu input order.
std::vector<MetricsReport> sweep(const PhotoStream& stream, const PairSimilarityFn& theta,
                                 const std::vector<double>& mu_values, const Partition& truth,
                                 const ClusterOptions& options = {});

}  // namespace evdet
