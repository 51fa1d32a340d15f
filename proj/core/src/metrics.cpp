#include "evdet/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "json.hpp"

namespace evdet {

using nlohmann::json;

namespace {

void check_same_items(const Partition& a, const Partition& b) {
    if (a.size() != b.size()) {
        throw std::runtime_error("partitions cover different item sets (sizes " +
                                 std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
    for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
        if (ia->first != ib->first) {
            throw std::runtime_error("partitions cover different item sets (first difference at '" +
                                     ia->first + "')");
        }
    }
}

std::unordered_map<std::string, int> cluster_sizes(const Partition& p) {
    std::unordered_map<std::string, int> sizes;
    for (const auto& [item, label] : p) sizes[label]++;
    return sizes;
}

double entropy(const std::unordered_map<std::string, int>& sizes, double n) {
    double h = 0.0;
    for (const auto& [label, count] : sizes) {
        double q = count / n;
        h -= q * std::log(q);
    }
    return h;
}

}  // namespace

double nmi(const Partition& predicted, const Partition& truth) {
    check_same_items(predicted, truth);
    if (predicted.empty()) return 1.0;
    const double n = static_cast<double>(predicted.size());

    auto pred_sizes = cluster_sizes(predicted);
    auto true_sizes = cluster_sizes(truth);
    std::map<std::pair<std::string, std::string>, int> joint;
    for (const auto& [item, pred_label] : predicted) {
        joint[{pred_label, truth.at(item)}]++;
    }

    double mutual = 0.0;
    for (const auto& [labels, count] : joint) {
        double pij = count / n;
        double pi = pred_sizes.at(labels.first) / n;
        double pj = true_sizes.at(labels.second) / n;
        mutual += pij * std::log(pij / (pi * pj));
    }
    double h_sum = entropy(pred_sizes, n) + entropy(true_sizes, n);
    if (h_sum == 0.0) return 1.0;  // both single-cluster, hence identical
    double value = 2.0 * mutual / h_sum;
    // Clamp away rounding residue on both ends of [0, 1].
    if (value < 0.0 && value > -1e-12) value = 0.0;
    if (value > 1.0) value = 1.0;
    return value;
}

BCubedScore bcubed(const Partition& predicted, const Partition& truth) {
    check_same_items(predicted, truth);
    BCubedScore score;
    if (predicted.empty()) return score;

    // Per predicted cluster: size and count per true label.
    std::unordered_map<std::string, int> pred_sizes = cluster_sizes(predicted);
    std::unordered_map<std::string, int> true_sizes = cluster_sizes(truth);
    std::map<std::pair<std::string, std::string>, int> joint;
    for (const auto& [item, pred_label] : predicted) {
        joint[{pred_label, truth.at(item)}]++;
    }

    double precision_sum = 0.0;
    double recall_sum = 0.0;
    for (const auto& [item, pred_label] : predicted) {
        const std::string& true_label = truth.at(item);
        int same_both = joint.at({pred_label, true_label});
        precision_sum += static_cast<double>(same_both) / pred_sizes.at(pred_label);
        recall_sum += static_cast<double>(same_both) / true_sizes.at(true_label);
    }
    const double n = static_cast<double>(predicted.size());
    score.precision = precision_sum / n;
    score.recall = recall_sum / n;
    score.f1 = (score.precision + score.recall) > 0.0
                   ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                   : 0.0;
    return score;
}

namespace {

json report_to_json(const MetricsReport& r) {
    json obj;
    obj["nmi"] = r.nmi;
    obj["bcubed_precision"] = r.bcubed_precision;
    obj["bcubed_recall"] = r.bcubed_recall;
    obj["bcubed_f1"] = r.bcubed_f1;
    obj["num_clusters"] = r.num_clusters;
    obj["num_photos"] = r.num_photos;
    obj["mu"] = r.mu;
    return obj;
}

}  // namespace

std::string report_to_json_string(const MetricsReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

std::string reports_to_json_string(const std::vector<MetricsReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr.dump(2) + "\n";
}

MetricsReport evaluate_partition(const Partition& predicted, const Partition& truth, double mu) {
    MetricsReport report;
    report.nmi = nmi(predicted, truth);
    BCubedScore bc = bcubed(predicted, truth);
    report.bcubed_precision = bc.precision;
    report.bcubed_recall = bc.recall;
    report.bcubed_f1 = bc.f1;
    report.num_clusters = static_cast<int>(cluster_sizes(predicted).size());
    report.num_photos = static_cast<int>(predicted.size());
    report.mu = mu;
    return report;
}

Partition truth_partition(const PhotoCollection& photos, const std::vector<std::string>& ids) {
    Partition truth;
    for (const auto& id : ids) {
        const Photo* photo = photos.find(id);
        if (!photo) throw std::runtime_error("photo '" + id + "' not found in the collection");
        if (!photo->event_id) {
            throw std::runtime_error("photo '" + id + "' has no ground-truth event_id");
        }
        truth.emplace(id, *photo->event_id);
    }
    return truth;
}

Partition partition_from_clustering(const Clustering& clustering) {
    Partition predicted;
    for (const auto& [photo_id, cluster_id] : clustering.assignment) {
        predicted.emplace(photo_id, std::to_string(cluster_id));
    }
    return predicted;
}

std::vector<MetricsReport> sweep(const PhotoStream& stream, const PairSimilarityFn& theta,
                                 const std::vector<double>& mu_values, const Partition& truth,
                                 const ClusterOptions& options) {
    std::vector<MetricsReport> reports;
    reports.reserve(mu_values.size());
    for (double mu : mu_values) {
        Clustering clustering = incremental_cluster(stream, theta, mu, options);
        reports.push_back(evaluate_partition(partition_from_clustering(clustering), truth, mu));
    }
    return reports;
}

}  // namespace evdet
