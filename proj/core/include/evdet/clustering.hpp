#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "evdet/records.hpp"

namespace evdet {

/// One event cluster. cluster_id is the creation index, starting at 0;
/// members are photo_ids in arrival order.
struct Cluster {
    int cluster_id = 0;
    std::vector<std::string> members;
};

/// The output partition of one clustering pass.
struct Clustering {
    std::vector<Cluster> clusters;
    double mu = 0.0;
    std::unordered_map<std::string, int> assignment;  // photo_id -> cluster_id
};

/// Pairwise similarity used by the clusterer (theta from the trained model).
using PairSimilarityFn = std::function<double(const Photo&, const Photo&)>;

struct ClusterOptions {
    /// When > 0, only clusters whose newest member uploaded within this many
    /// seconds of the arriving photo are considered. 0 disables pruning.
    std::int64_t window_seconds = 0;
};

/// Arithmetic mean of theta(photo, m) over the cluster members. Throws on an
/// empty member list.
double photo_cluster_similarity(const Photo& photo, const std::vector<const Photo*>& members,
                                const PairSimilarityFn& theta);

/// One-pass incremental clustering over the ordered stream: each photo joins
/// the cluster with the highest average similarity if that maximum strictly
/// exceeds mu, otherwise it opens a new cluster. Ties on the maximum go to
/// the lowest cluster_id. Worst case n(n-1)/2 theta evaluations; each
/// (photo, member) pair is evaluated at most once per run.
Clustering incremental_cluster(const PhotoStream& stream, const PairSimilarityFn& theta, double mu,
                               const ClusterOptions& options = {});

/// CSV with header "photo_id,cluster_id", one row per photo in stream order.
void write_clustering_csv(std::ostream& out, const PhotoStream& stream,
                          const Clustering& clustering);

/// Reads the CSV back as photo_id -> cluster label, preserving row order in
/// the returned list of ids.
struct ClusteringFile {
    std::vector<std::string> photo_ids;                       // row order
    std::unordered_map<std::string, std::string> assignment;  // photo_id -> cluster label
};
ClusteringFile read_clustering_csv(std::istream& in);

}  // namespace evdet
