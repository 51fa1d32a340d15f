// Acceptance suite. Each criterion prints exactly one PASS/FAIL line; the
// process exits nonzero when any selected criterion fails. Criteria needing
// the command line binary receive its path via --cli (falling back to the
// build-time default).

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evdet/clustering.hpp"
#include "evdet/io_util.hpp"
#include "evdet/metrics.hpp"
#include "evdet/pipeline.hpp"
#include "evdet/records.hpp"
#include "evdet/similarity.hpp"
#include "evdet/social_graph.hpp"
#include "evdet/synth.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

#ifndef EVDET_CLI_PATH
#define EVDET_CLI_PATH ""
#endif

std::string g_cli_path = EVDET_CLI_PATH;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct CheckFailure {
    std::string message;
};

void expect(bool condition, const std::string& message) {
    if (!condition) throw CheckFailure{message};
}

int run_cli(const std::string& args, std::string* output = nullptr) {
    std::string command = g_cli_path + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    expect(pipe != nullptr, "failed to spawn CLI");
    std::string text;
    char buffer[4096];
    while (std::size_t got = fread(buffer, 1, sizeof(buffer), pipe)) text.append(buffer, got);
    int status = pclose(pipe);
    if (output) *output = text;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() /
               ("evdet_acceptance_" + tag + "_" + std::to_string(static_cast<long>(getpid())));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

evdet::Photo quick_photo(const std::string& id, std::int64_t upload) {
    evdet::Photo p;
    p.photo_id = id;
    p.user_id = "u";
    p.taken_time = upload;
    p.upload_time = upload;
    return p;
}

// ---- criterion 1: clustering matches the from-definition reference -------

void criterion_clustering_oracle() {
    auto start = Clock::now();
    std::mt19937_64 rng(1234);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (int trial = 0; trial < 50; ++trial) {
        int n = 20 + static_cast<int>(rng() % 181);  // up to 200
        std::vector<evdet::Photo> photos;
        for (int i = 0; i < n; ++i) {
            photos.push_back(quick_photo("p" + std::to_string(10000 + i),
                                         static_cast<std::int64_t>(rng() % 100000)));
        }
        // Random symmetric similarity keyed on id pairs; includes exact ties
        // by quantizing to two decimals so the tie-break rule is exercised.
        std::map<std::pair<std::string, std::string>, double> table;
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double value = std::floor(unit(rng) * 100.0) / 100.0;
                table[{photos[static_cast<std::size_t>(i)].photo_id,
                       photos[static_cast<std::size_t>(j)].photo_id}] = value;
            }
        }
        evdet::PairSimilarityFn theta = [&table](const evdet::Photo& a, const evdet::Photo& b) {
            auto it = table.find({a.photo_id, b.photo_id});
            if (it == table.end()) it = table.find({b.photo_id, a.photo_id});
            return it->second;
        };
        double mu = unit(rng);
        std::int64_t window = trial % 4 == 0 ? static_cast<std::int64_t>(rng() % 50000) : 0;

        evdet::PhotoStream stream = evdet::order_stream(evdet::PhotoCollection(photos));
        evdet::Clustering fast =
            evdet::incremental_cluster(stream, theta, mu, evdet::ClusterOptions{window});
        evdet::Clustering slow = oracle::cluster_reference(stream, theta, mu, window);
        expect(oracle::clusterings_equal(fast, slow),
               "trial " + std::to_string(trial) + ": clustering diverged from the reference");
    }
    double elapsed = seconds_since(start);
    expect(elapsed < 30.0, "runtime budget exceeded: " + std::to_string(elapsed) + "s");
}

// ---- criterion 2: walk correctness ---------------------------------------

void criterion_walk_correctness() {
    auto start = Clock::now();

    // Closed form on the two-node chain.
    {
        evdet::SocialGraph::Builder builder;
        int a = builder.add_node(evdet::NodeType::User, "a");
        builder.add_node(evdet::NodeType::Photo, "b");
        builder.add_edge(a, 1, 1.0);
        evdet::SocialGraph g = std::move(builder).finish();
        evdet::GraphConfig config;
        config.tol = 1e-14;
        config.max_iter = 10000;
        std::vector<double> v = evdet::personalized_pagerank(g, a, config);
        expect(std::fabs(v[0] - 0.5405405405405405) < 1e-9, "two-node source mass off");
        expect(std::fabs(v[1] - 0.4594594594594595) < 1e-9, "two-node target mass off");
    }

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 5 + static_cast<int>(rng() % 46);  // up to 50
        evdet::SocialGraph::Builder builder;
        for (int i = 0; i < n; ++i) builder.add_node(evdet::NodeType::User, "n" + std::to_string(i));
        double edge_prob = 0.05 + 0.25 * unit(rng);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && unit(rng) < edge_prob) builder.add_edge(i, j, 0.2 + 3.0 * unit(rng));
            }
        }
        evdet::SocialGraph g = std::move(builder).finish();
        int source = static_cast<int>(rng() % static_cast<std::uint64_t>(n));

        evdet::GraphConfig config;
        config.tol = 1e-12;
        config.max_iter = 20000;
        std::vector<double> iterated = evdet::personalized_pagerank(g, source, config);
        std::vector<double> solved = oracle::ppr_dense(g, source, config.alpha);

        double total = 0.0;
        for (std::size_t i = 0; i < iterated.size(); ++i) {
            expect(std::fabs(iterated[i] - solved[i]) < 1e-9,
                   "trial " + std::to_string(trial) + ": node " + std::to_string(i) +
                       " diverges from the dense solve");
            total += iterated[i];
        }
        expect(std::fabs(total - 1.0) < 1e-6, "walk mass does not sum to 1");
        expect(iterated[static_cast<std::size_t>(source)] >= config.alpha - 1e-9,
               "source mass below the restart probability");
    }
    double elapsed = seconds_since(start);
    expect(elapsed < 10.0, "runtime budget exceeded: " + std::to_string(elapsed) + "s");
}

// ---- criterion 3: metric fixtures ----------------------------------------

void criterion_metric_fixtures() {
    using evdet::Partition;
    auto make = [](std::initializer_list<std::pair<const char*, const char*>> pairs) {
        Partition p;
        for (const auto& [k, v] : pairs) p[k] = v;
        return p;
    };

    // Hand-computed fixtures, tolerance 1e-12.
    {
        Partition p = make({{"a", "c1"}, {"b", "c1"}, {"c", "c2"}});
        Partition relabeled = make({{"a", "x"}, {"b", "x"}, {"c", "y"}});
        expect(std::fabs(evdet::nmi(p, relabeled) - 1.0) < 1e-12, "identity NMI fixture");
        evdet::BCubedScore b = evdet::bcubed(p, relabeled);
        expect(std::fabs(b.f1 - 1.0) < 1e-12, "identity B-Cubed fixture");
    }
    {
        // Independent partitions: uniform 2x2 contingency, NMI exactly 0.
        Partition p = make({{"a", "c0"}, {"b", "c0"}, {"c", "c1"}, {"d", "c1"}});
        Partition t = make({{"a", "t0"}, {"b", "t1"}, {"c", "t0"}, {"d", "t1"}});
        expect(std::fabs(evdet::nmi(p, t)) < 1e-12, "independence NMI fixture");
    }
    {
        // Singletons vs one true cluster of 4: B-Cubed P=1, R=1/4, F1=0.4.
        Partition p = make({{"a", "0"}, {"b", "1"}, {"c", "2"}, {"d", "3"}});
        Partition t = make({{"a", "e"}, {"b", "e"}, {"c", "e"}, {"d", "e"}});
        expect(std::fabs(evdet::nmi(p, t)) < 1e-12, "singleton NMI fixture");
        evdet::BCubedScore b = evdet::bcubed(p, t);
        expect(std::fabs(b.precision - 1.0) < 1e-12, "singleton precision fixture");
        expect(std::fabs(b.recall - 0.25) < 1e-12, "singleton recall fixture");
        expect(std::fabs(b.f1 - 0.4) < 1e-12, "singleton F1 fixture");
    }
    {
        // Split cluster: truth {a,b,c}, predicted {a,b}+{c}: R=5/9, F1=5/7.
        Partition p = make({{"a", "c1"}, {"b", "c1"}, {"c", "c2"}});
        Partition t = make({{"a", "e"}, {"b", "e"}, {"c", "e"}});
        evdet::BCubedScore b = evdet::bcubed(p, t);
        expect(std::fabs(b.recall - 5.0 / 9.0) < 1e-12, "split recall fixture");
        expect(std::fabs(b.f1 - 5.0 / 7.0) < 1e-12, "split F1 fixture");
        // Single-cluster against single-cluster is defined as 1.
        expect(std::fabs(evdet::nmi(t, t) - 1.0) < 1e-12, "degenerate NMI fixture");
    }

    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 100; ++trial) {
        int n = 2 + static_cast<int>(rng() % 29);  // up to 30 items
        std::vector<std::string> items;
        for (int i = 0; i < n; ++i) items.push_back("x" + std::to_string(i));
        Partition p = oracle::random_partition(items, 1 + static_cast<int>(rng() % 7), rng);
        Partition t = oracle::random_partition(items, 1 + static_cast<int>(rng() % 7), rng);

        expect(std::fabs(evdet::nmi(p, t) - oracle::nmi_reference(p, t)) < 1e-9,
               "trial " + std::to_string(trial) + ": NMI diverges from brute force");
        evdet::BCubedScore mine = evdet::bcubed(p, t);
        evdet::BCubedScore ref = oracle::bcubed_reference(p, t);
        expect(std::fabs(mine.precision - ref.precision) < 1e-9 &&
                   std::fabs(mine.recall - ref.recall) < 1e-9 &&
                   std::fabs(mine.f1 - ref.f1) < 1e-9,
               "trial " + std::to_string(trial) + ": B-Cubed diverges from brute force");
    }
}

// ---- criterion 4: SVM training behavior ----------------------------------

void criterion_svm() {
    // 200 linearly separable pairs with margin >= 0.5 around a fixed
    // separator; training must classify all of them.
    {
        const std::vector<double> w_star = {2.0, -1.5, 0.0, 1.0, 0.5, -2.0};
        const double b_star = -0.3;
        std::mt19937_64 rng(2025);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<evdet::TrainingPair> pairs;
        int pos = 0, neg = 0;
        while (pairs.size() < 200) {
            evdet::FeatureVector fv;
            fv.time_sim = unit(rng);
            fv.geo_sim = unit(rng);
            fv.geo_missing = unit(rng) < 0.3 ? 1.0 : 0.0;
            fv.tag_sim = unit(rng);
            fv.text_sim = unit(rng);
            fv.social_affinity = unit(rng);
            double margin = b_star + w_star[0] * fv.time_sim + w_star[1] * fv.geo_sim +
                            w_star[2] * fv.geo_missing + w_star[3] * fv.tag_sim +
                            w_star[4] * fv.text_sim + w_star[5] * fv.social_affinity;
            if (std::fabs(margin) < 0.5) continue;
            int label = margin > 0.0 ? 1 : -1;
            if (label > 0 && pos > neg + 50) continue;
            if (label < 0 && neg > pos + 50) continue;
            evdet::TrainingPair pair;
            pair.features = fv;
            pair.label = label;
            pairs.push_back(pair);
            (label > 0 ? pos : neg)++;
        }
        evdet::TrainConfig config;
        config.epochs = 200;
        config.seed = 7;
        evdet::SimilarityModel model =
            evdet::train(pairs, evdet::feature_names({true, false}), config, "d");
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            double margin = model.margin(pairs[i].features);
            expect((margin > 0.0 ? 1 : -1) == pairs[i].label,
                   "separable pair " + std::to_string(i) + " misclassified");
        }
    }

    // Objective within 5% of a dense grid-search oracle on two features.
    {
        // A tenth of the labels are flipped (together with their mirror
        // image, so the optimal bias stays 0) to give the optimum a solid
        // hinge floor; a relative tolerance near an objective of zero would
        // be unreasonably strict for a stochastic optimizer.
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::vector<evdet::TrainingPair> pairs;
        while (pairs.size() < 240) {
            evdet::FeatureVector fv;
            fv.time_sim = unit(rng) * 2.0 - 1.0;
            fv.geo_sim = unit(rng) * 2.0 - 1.0;
            double margin = 1.8 * fv.time_sim - 1.1 * fv.geo_sim;
            bool flip = unit(rng) < 0.10;
            if (std::fabs(margin) < 0.4) continue;
            evdet::TrainingPair pair;
            pair.features = fv;
            pair.label = margin > 0.0 ? 1 : -1;
            if (flip) pair.label = -pair.label;
            pairs.push_back(pair);
            evdet::TrainingPair mirrored;  // mirror keeps the optimal bias at 0
            mirrored.features.time_sim = -fv.time_sim;
            mirrored.features.geo_sim = -fv.geo_sim;
            mirrored.label = -pair.label;
            pairs.push_back(mirrored);
        }
        std::vector<std::string> names = {"time", "geo"};
        evdet::TrainConfig config;
        config.lambda = 0.05;
        config.epochs = 150;
        config.seed = 3;
        evdet::SimilarityModel model = evdet::train(pairs, names, config, "d");

        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        for (const evdet::TrainingPair& pair : pairs) {
            rows.push_back(evdet::standardize(
                evdet::feature_values(pair.features, names),
                evdet::Standardization{model.means, model.stds}));
            labels.push_back(pair.label);
        }
        double trained =
            evdet::svm_objective(model.weights, model.bias, config.lambda, rows, labels);
        double oracle_best = 1e18;
        for (double w1 = -5.0; w1 <= 5.0; w1 += 0.01) {
            for (double w2 = -5.0; w2 <= 5.0; w2 += 0.01) {
                std::vector<double> w = {w1, w2};
                double obj = evdet::svm_objective(w, 0.0, config.lambda, rows, labels);
                if (obj < oracle_best) oracle_best = obj;
            }
        }
        expect(trained <= oracle_best * 1.05 + 1e-9,
               "trained objective " + std::to_string(trained) + " misses oracle " +
                   std::to_string(oracle_best));
    }

    // Sampled negative:positive ratio stays at or below 5 on every run.
    {
        std::mt19937_64 rng(505);
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<evdet::Photo> photos;
            int events = 2 + static_cast<int>(rng() % 6);
            int next = 0;
            for (int e = 0; e < events; ++e) {
                int size = 2 + static_cast<int>(rng() % 12);
                for (int i = 0; i < size; ++i) {
                    evdet::Photo p = quick_photo("p" + std::to_string(next), next);
                    ++next;
                    p.event_id = "e" + std::to_string(e);
                    photos.push_back(p);
                }
            }
            evdet::SamplingConfig config;
            config.seed = rng();
            std::vector<evdet::TrainingPair> pairs =
                evdet::sample_pairs(evdet::PhotoCollection(photos), config);
            long positives =
                std::count_if(pairs.begin(), pairs.end(),
                              [](const evdet::TrainingPair& p) { return p.label == 1; });
            long negatives = static_cast<long>(pairs.size()) - positives;
            expect(positives > 0, "no positives sampled");
            expect(negatives <= 5 * positives,
                   "trial " + std::to_string(trial) + ": negative:positive ratio above 5");
        }
    }
}

// ---- criterion 5: threshold boundaries through the CLI --------------------

void criterion_cli_boundaries() {
    TempDir dir("c5");
    std::string photos = dir.file("photos.jsonl");
    std::string interactions = dir.file("interactions.jsonl");
    expect(run_cli("synth --out-photos " + photos + " --out-interactions " + interactions +
                   " --seed 15") == 0,
           "synth failed");
    std::string model = dir.file("model.json");
    expect(run_cli("train --photos " + photos + " --interactions " + interactions + " --model " +
                   model) == 0,
           "train failed");

    auto read_labels = [](const std::string& csv_path) {
        std::ifstream in(csv_path);
        std::string line;
        std::getline(in, line);
        std::set<std::string> labels;
        int rows = 0;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ++rows;
            labels.insert(line.substr(line.find(',') + 1));
        }
        return std::pair<int, int>(rows, static_cast<int>(labels.size()));
    };

    std::string singles = dir.file("singles.csv");
    expect(run_cli("cluster --photos " + photos + " --interactions " + interactions +
                   " --model " + model + " --mu 1.0 --out " + singles) == 0,
           "cluster at mu=1 failed");
    auto [rows_s, labels_s] = read_labels(singles);
    expect(rows_s > 0 && labels_s == rows_s, "mu >= 1 must produce all singletons");

    std::string merged = dir.file("merged.csv");
    expect(run_cli("cluster --photos " + photos + " --interactions " + interactions +
                   " --model " + model + " --mu -0.1 --out " + merged) == 0,
           "cluster at mu<0 failed");
    auto [rows_m, labels_m] = read_labels(merged);
    expect(rows_m > 0 && labels_m == 1, "mu < 0 must produce a single cluster");
}

// ---- criterion 6: shipped ablation profile --------------------------------

void criterion_ablation_profile() {
    auto start = Clock::now();
    fs::path profile = fs::path(PROJECT_SOURCE_DIR) / "profiles" / "ablation.json";
    expect(fs::exists(profile), "shipped profile missing: " + profile.string());

    evdet::PipelineConfig config = evdet::PipelineConfig::load(profile);
    expect(config.ablation_seeds.size() == 10, "profile must freeze 10 seeds");
    evdet::AblationSummary summary = evdet::run_ablation(config);

    expect(summary.mean_photo_only_nmi >= 0.6 && summary.mean_photo_only_nmi <= 0.8,
           "photo-only NMI " + std::to_string(summary.mean_photo_only_nmi) +
               " outside the [0.6, 0.8] difficulty band");
    expect(summary.mean_delta_nmi >= 0.05,
           "social improvement " + std::to_string(summary.mean_delta_nmi) + " below 0.05");
    double elapsed = seconds_since(start);
    expect(elapsed < 120.0, "runtime budget exceeded: " + std::to_string(elapsed) + "s");
}

// ---- criterion 7: byte-identical reruns -----------------------------------

void criterion_determinism() {
    TempDir dir("c7");
    std::string config_path = dir.file("config.json");
    evdet::atomic_write_file(config_path, R"({
  "sampling": {"seed": 11},
  "training": {"seed": 11, "epochs": 12},
  "synth": {"seed": 11, "num_events": 6}
})");

    auto run_once = [&](const std::string& tag) {
        std::string photos = dir.file(tag + "_photos.jsonl");
        std::string interactions = dir.file(tag + "_interactions.jsonl");
        std::string model = dir.file(tag + "_model.json");
        std::string csv = dir.file(tag + "_clusters.csv");
        std::string metrics = dir.file(tag + "_metrics.json");
        expect(run_cli("synth --config " + config_path + " --out-photos " + photos +
                       " --out-interactions " + interactions) == 0,
               tag + ": synth failed");
        expect(run_cli("train --photos " + photos + " --interactions " + interactions +
                       " --config " + config_path + " --model " + model) == 0,
               tag + ": train failed");
        expect(run_cli("cluster --photos " + photos + " --interactions " + interactions +
                       " --config " + config_path + " --model " + model + " --mu 0.5 --out " +
                       csv) == 0,
               tag + ": cluster failed");
        expect(run_cli("evaluate --clusters " + csv + " --photos " + photos +
                       " --mu 0.5 --out " + metrics) == 0,
               tag + ": evaluate failed");
        return std::tuple<std::string, std::string, std::string>(
            evdet::read_file_string(model), evdet::read_file_string(csv),
            evdet::read_file_string(metrics));
    };

    auto [model1, csv1, metrics1] = run_once("first");
    auto [model2, csv2, metrics2] = run_once("second");
    expect(model1 == model2, "model files differ between identical runs");
    expect(csv1 == csv2, "clustering CSVs differ between identical runs");
    expect(metrics1 == metrics2, "metrics JSONs differ between identical runs");
}

struct Criterion {
    int number;
    const char* description;
    void (*run)();
};

const Criterion kCriteria[] = {
    {1, "incremental clustering matches the from-definition reference", criterion_clustering_oracle},
    {2, "restart walk matches closed forms and dense solves", criterion_walk_correctness},
    {3, "NMI and B-Cubed reproduce fixtures and brute force", criterion_metric_fixtures},
    {4, "SVM separates, approaches the grid oracle, respects the pair ratio", criterion_svm},
    {5, "threshold boundary behavior through the CLI", criterion_cli_boundaries},
    {6, "shipped ablation profile shows the social lift", criterion_ablation_profile},
    {7, "identical config and seeds give byte-identical outputs", criterion_determinism},
};

}  // namespace

int main(int argc, char** argv) {
    int selected = 0;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--criterion" && i + 1 < argc) {
            selected = std::atoi(argv[++i]);
        } else if (arg == "--cli" && i + 1 < argc) {
            g_cli_path = argv[++i];
        } else {
            std::fprintf(stderr, "usage: acceptance [--criterion N] [--cli PATH]\n");
            return 2;
        }
    }

    int failures = 0;
    for (const Criterion& criterion : kCriteria) {
        if (selected != 0 && criterion.number != selected) continue;
        try {
            criterion.run();
            std::printf("PASS criterion %d: %s\n", criterion.number, criterion.description);
        } catch (const CheckFailure& failure) {
            std::printf("FAIL criterion %d: %s (%s)\n", criterion.number, criterion.description,
                        failure.message.c_str());
            ++failures;
        } catch (const std::exception& e) {
            std::printf("FAIL criterion %d: %s (unexpected error: %s)\n", criterion.number,
                        criterion.description, e.what());
            ++failures;
        }
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
