#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "evdet/records.hpp"

namespace evdet {

enum class NodeType { User, Photo, Tag };

const char* to_string(NodeType type);

struct GraphConfig {
    double alpha = 0.15;  // restart probability, in (0,1)
    double tol = 1e-8;    // L1 residual convergence tolerance
    int max_iter = 200;
    double w_auth = 1.0;
    double w_comment = 1.0;
    double w_favorite = 1.0;
    double w_tag = 1.0;

    void validate() const;
};

/// Directed weighted graph over USER/PHOTO/TAG nodes with dense indices.
/// Immutable once built; no self-loops; all edge weights > 0. Parallel
/// contributions between the same node pair are summed into one edge.
class SocialGraph {
public:
    struct Edge {
        int target;
        double weight;
    };

    /// Incremental builder for tests and synthetic graphs.
    class Builder {
    public:
        int add_node(NodeType type, std::string label);
        void add_edge(int source, int target, double weight);
        SocialGraph finish() &&;

    private:
        friend class SocialGraph;
        std::vector<NodeType> types_;
        std::vector<std::string> labels_;
        std::unordered_map<std::int64_t, double> edge_weights_;  // (source<<32|target) -> w
        int node_count_ = 0;
    };

    /// Domain construction: authorship, comment, favorite and tag edges, all
    /// added in both directions. Comment weight scales with the per-user
    /// comment count; favorites count once per (user, photo). Throws when an
    /// interaction references a photo_id missing from the collection.
    static SocialGraph build(const PhotoCollection& photos, const InteractionLog& interactions,
                             const GraphConfig& config);

    int node_count() const { return static_cast<int>(types_.size()); }
    NodeType type_of(int node) const { return types_[static_cast<std::size_t>(node)]; }
    const std::string& label_of(int node) const { return labels_[static_cast<std::size_t>(node)]; }
    std::optional<int> photo_node(const std::string& photo_id) const;

    std::span<const Edge> out_edges(int node) const;
    double out_weight(int node) const { return out_weight_[static_cast<std::size_t>(node)]; }

private:
    std::vector<NodeType> types_;
    std::vector<std::string> labels_;
    std::vector<int> offsets_;  // CSR offsets, size node_count+1
    std::vector<Edge> edges_;   // sorted by (source, target)
    std::vector<double> out_weight_;
    std::unordered_map<std::string, int> photo_nodes_;
};

/// One step of the restart walk:
///   v' = alpha * e_source + (1 - alpha) * (P^T v + m * e_source)
/// where P is the row-stochastic transition matrix and m is the probability
/// mass currently on dangling nodes. Preserves the L1 norm.
std::vector<double> transition_step(const SocialGraph& graph, const std::vector<double>& v,
                                    int source, double alpha);

/// Fixed point of transition_step starting from e_source, iterated until the
/// L1 change drops below config.tol. Throws when max_iter is reached first,
/// reporting the final residual.
std::vector<double> personalized_pagerank(const SocialGraph& graph, int source,
                                          const GraphConfig& config);

/// Memo of PPR vectors keyed by source node. Values are deterministic, so
/// first-write-wins is safe under concurrent insertion.
class PprCache {
public:
    PprCache(const SocialGraph& graph, GraphConfig config)
        : graph_(graph), config_(config) {}

    const std::vector<double>& vector_for(int source);

private:
    const SocialGraph& graph_;
    GraphConfig config_;
    std::mutex mutex_;
    std::unordered_map<int, std::vector<double>> cache_;
};

/// Symmetrized source->target walk mass: (r_i(j) + r_j(i)) / 2. Zero when
/// the photos sit in different weakly connected components.
double social_affinity(PprCache& cache, int photo_node_i, int photo_node_j);

}  // namespace evdet
