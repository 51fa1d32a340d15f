#include "evdet/social_graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace evdet {

const char* to_string(NodeType type) {
    switch (type) {
        case NodeType::User: return "USER";
        case NodeType::Photo: return "PHOTO";
        case NodeType::Tag: return "TAG";
    }
    throw std::logic_error("invalid NodeType");
}

void GraphConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::runtime_error("graph config: alpha must be in (0,1)");
    if (!(tol > 0.0)) throw std::runtime_error("graph config: tol must be > 0");
    if (max_iter < 1) throw std::runtime_error("graph config: max_iter must be >= 1");
    if (w_auth < 0.0 || w_comment < 0.0 || w_favorite < 0.0 || w_tag < 0.0) {
        throw std::runtime_error("graph config: edge weights must be >= 0");
    }
}

namespace {
constexpr std::int64_t edge_key(int source, int target) {
    return (static_cast<std::int64_t>(source) << 32) | static_cast<std::uint32_t>(target);
}
}  // namespace

int SocialGraph::Builder::add_node(NodeType type, std::string label) {
    types_.push_back(type);
    labels_.push_back(std::move(label));
    return node_count_++;
}

void SocialGraph::Builder::add_edge(int source, int target, double weight) {
    if (source < 0 || source >= node_count_ || target < 0 || target >= node_count_) {
        throw std::runtime_error("graph builder: edge endpoint out of range");
    }
    if (source == target) throw std::runtime_error("graph builder: self-loops are not allowed");
    if (!(weight > 0.0)) throw std::runtime_error("graph builder: edge weight must be > 0");
    edge_weights_[edge_key(source, target)] += weight;
}

SocialGraph SocialGraph::Builder::finish() && {
    SocialGraph g;
    g.types_ = std::move(types_);
    g.labels_ = std::move(labels_);
    const std::size_t n = g.types_.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (g.types_[i] == NodeType::Photo) {
            g.photo_nodes_.emplace(g.labels_[i], static_cast<int>(i));
        }
    }
    // Deterministic CSR layout: edges sorted by (source, target).
    std::map<std::int64_t, double> sorted(edge_weights_.begin(), edge_weights_.end());
    g.offsets_.assign(n + 1, 0);
    g.edges_.reserve(sorted.size());
    g.out_weight_.assign(n, 0.0);
    for (const auto& [key, weight] : sorted) {
        int source = static_cast<int>(key >> 32);
        g.offsets_[static_cast<std::size_t>(source) + 1]++;
        g.out_weight_[static_cast<std::size_t>(source)] += weight;
    }
    for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
    for (const auto& [key, weight] : sorted) {
        int target = static_cast<int>(key & 0xffffffff);
        g.edges_.push_back({target, weight});
    }
    return g;
}

std::optional<int> SocialGraph::photo_node(const std::string& photo_id) const {
    auto it = photo_nodes_.find(photo_id);
    if (it == photo_nodes_.end()) return std::nullopt;
    return it->second;
}

std::span<const SocialGraph::Edge> SocialGraph::out_edges(int node) const {
    auto begin = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(node)]);
    auto end = static_cast<std::size_t>(offsets_[static_cast<std::size_t>(node) + 1]);
    return {edges_.data() + begin, end - begin};
}

SocialGraph SocialGraph::build(const PhotoCollection& photos, const InteractionLog& interactions,
                               const GraphConfig& config) {
    config.validate();
    Builder builder;
    std::unordered_map<std::string, int> user_nodes;
    std::unordered_map<std::string, int> tag_nodes;

    auto user_node = [&](const std::string& user_id) {
        auto it = user_nodes.find(user_id);
        if (it != user_nodes.end()) return it->second;
        int node = builder.add_node(NodeType::User, user_id);
        user_nodes.emplace(user_id, node);
        return node;
    };
    auto tag_node = [&](const std::string& tag) {
        auto it = tag_nodes.find(tag);
        if (it != tag_nodes.end()) return it->second;
        int node = builder.add_node(NodeType::Tag, tag);
        tag_nodes.emplace(tag, node);
        return node;
    };
    auto add_both = [&](int a, int b, double w) {
        if (w > 0.0) {
            builder.add_edge(a, b, w);
            builder.add_edge(b, a, w);
        }
    };

    std::unordered_map<std::string, int> photo_nodes;
    photo_nodes.reserve(photos.size());
    for (const Photo& p : photos.photos()) {
        int pn = builder.add_node(NodeType::Photo, p.photo_id);
        photo_nodes.emplace(p.photo_id, pn);
        add_both(user_node(p.user_id), pn, config.w_auth);
        for (const std::string& tag : p.tags) {
            add_both(pn, tag_node(tag), config.w_tag);
        }
    }

    // Comment multiplicity per (user, photo); favorites are 0/1.
    std::map<std::pair<std::string, std::string>, int> comment_counts;
    std::map<std::pair<std::string, std::string>, bool> favorites;
    for (const Interaction& x : interactions) {
        if (!photo_nodes.contains(x.photo_id)) {
            throw std::runtime_error("interaction references unknown photo_id '" + x.photo_id + "'");
        }
        if (x.kind == InteractionKind::Comment) {
            comment_counts[{x.user_id, x.photo_id}]++;
        } else {
            favorites[{x.user_id, x.photo_id}] = true;
        }
    }
    for (const auto& [key, count] : comment_counts) {
        add_both(user_node(key.first), photo_nodes.at(key.second), count * config.w_comment);
    }
    for (const auto& [key, present] : favorites) {
        if (present) add_both(user_node(key.first), photo_nodes.at(key.second), config.w_favorite);
    }
    return std::move(builder).finish();
}

std::vector<double> transition_step(const SocialGraph& graph, const std::vector<double>& v,
                                    int source, double alpha) {
    const std::size_t n = static_cast<std::size_t>(graph.node_count());
    std::vector<double> next(n, 0.0);
    double dangling = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        double mass = v[u];
        if (mass == 0.0) continue;
        double total = graph.out_weight(static_cast<int>(u));
        if (total == 0.0) {
            dangling += mass;
            continue;
        }
        for (const auto& edge : graph.out_edges(static_cast<int>(u))) {
            next[static_cast<std::size_t>(edge.target)] += mass * edge.weight / total;
        }
    }
    for (double& x : next) x *= (1.0 - alpha);
    next[static_cast<std::size_t>(source)] += alpha + (1.0 - alpha) * dangling;
    return next;
}

std::vector<double> personalized_pagerank(const SocialGraph& graph, int source,
                                          const GraphConfig& config) {
    config.validate();
    if (source < 0 || source >= graph.node_count()) {
        throw std::runtime_error("personalized_pagerank: source node out of range");
    }
    std::vector<double> v(static_cast<std::size_t>(graph.node_count()), 0.0);
    v[static_cast<std::size_t>(source)] = 1.0;
    double residual = 0.0;
    for (int iter = 0; iter < config.max_iter; ++iter) {
        std::vector<double> next = transition_step(graph, v, source, config.alpha);
        residual = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) residual += std::abs(next[i] - v[i]);
        v = std::move(next);
        if (residual < config.tol) return v;
    }
    std::ostringstream msg;
    msg << "personalized_pagerank: no convergence after " << config.max_iter
        << " iterations (residual " << residual << ", tol " << config.tol << ")";
    throw std::runtime_error(msg.str());
}

const std::vector<double>& PprCache::vector_for(int source) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(source);
        if (it != cache_.end()) return it->second;
    }
    std::vector<double> v = personalized_pagerank(graph_, source, config_);
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.try_emplace(source, std::move(v)).first->second;
}

double social_affinity(PprCache& cache, int photo_node_i, int photo_node_j) {
    const auto& ri = cache.vector_for(photo_node_i);
    const auto& rj = cache.vector_for(photo_node_j);
    return 0.5 * (ri[static_cast<std::size_t>(photo_node_j)] +
                  rj[static_cast<std::size_t>(photo_node_i)]);
}

}  // namespace evdet
