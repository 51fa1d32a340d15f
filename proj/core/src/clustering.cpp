#include "evdet/clustering.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace evdet {

double photo_cluster_similarity(const Photo& photo, const std::vector<const Photo*>& members,
                                const PairSimilarityFn& theta) {
    if (members.empty()) throw std::runtime_error("photo_cluster_similarity: empty cluster");
    double sum = 0.0;
    for (const Photo* member : members) sum += theta(photo, *member);
    return sum / static_cast<double>(members.size());
}

Clustering incremental_cluster(const PhotoStream& stream, const PairSimilarityFn& theta, double mu,
                               const ClusterOptions& options) {
    Clustering result;
    result.mu = mu;

    // Member photos per cluster, plus each cluster's newest upload time for
    // the optional window pruning.
    std::vector<std::vector<const Photo*>> members;
    std::vector<std::int64_t> newest_upload;

    for (const Photo& photo : stream.photos) {
        int best_cluster = -1;
        double best_similarity = 0.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (options.window_seconds > 0 &&
                photo.upload_time - newest_upload[k] > options.window_seconds) {
                continue;
            }
            double similarity = photo_cluster_similarity(photo, members[k], theta);
            if (best_cluster < 0 || similarity > best_similarity) {
                best_cluster = static_cast<int>(k);
                best_similarity = similarity;
            }
        }
        if (best_cluster >= 0 && best_similarity > mu) {
            members[static_cast<std::size_t>(best_cluster)].push_back(&photo);
            newest_upload[static_cast<std::size_t>(best_cluster)] =
                std::max(newest_upload[static_cast<std::size_t>(best_cluster)], photo.upload_time);
            result.clusters[static_cast<std::size_t>(best_cluster)].members.push_back(
                photo.photo_id);
            result.assignment.emplace(photo.photo_id, best_cluster);
        } else {
            int id = static_cast<int>(result.clusters.size());
            result.clusters.push_back({id, {photo.photo_id}});
            members.push_back({&photo});
            newest_upload.push_back(photo.upload_time);
            result.assignment.emplace(photo.photo_id, id);
        }
    }
    return result;
}

void write_clustering_csv(std::ostream& out, const PhotoStream& stream,
                          const Clustering& clustering) {
    out << "photo_id,cluster_id\n";
    for (const Photo& photo : stream.photos) {
        auto it = clustering.assignment.find(photo.photo_id);
        if (it == clustering.assignment.end()) {
            throw std::runtime_error("clustering has no assignment for photo '" + photo.photo_id +
                                     "'");
        }
        out << photo.photo_id << ',' << it->second << '\n';
    }
}

ClusteringFile read_clustering_csv(std::istream& in) {
    ClusteringFile file;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("clustering CSV: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "photo_id,cluster_id") {
        throw std::runtime_error("clustering CSV: expected header 'photo_id,cluster_id'");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 >= line.size()) {
            throw std::runtime_error("clustering CSV line " + std::to_string(line_no) +
                                     ": expected 'photo_id,cluster_id'");
        }
        std::string id = line.substr(0, comma);
        std::string cluster = line.substr(comma + 1);
        if (!file.assignment.emplace(id, cluster).second) {
            throw std::runtime_error("clustering CSV line " + std::to_string(line_no) +
                                     ": duplicate photo_id '" + id + "'");
        }
        file.photo_ids.push_back(std::move(id));
    }
    return file;
}

}  // namespace evdet
