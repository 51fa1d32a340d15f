// Microbenchmarks for the hot paths: the personalized random-walk solve,
// pair feature assembly, the one-pass clustering scan, and SVM training.
// All inputs come from the planted-event generator so sizes are easy to
// scale and runs are deterministic.
#include <benchmark/benchmark.h>

#include <cstdint>
#include <string>
#include <vector>

#include "evdet/clustering.hpp"
#include "evdet/features.hpp"
#include "evdet/pipeline.hpp"
#include "evdet/records.hpp"
#include "evdet/similarity.hpp"
#include "evdet/social_graph.hpp"
#include "evdet/synth.hpp"

namespace {

evdet::SynthDataset make_dataset(int num_events) {
    evdet::SynthConfig config;
    config.num_events = num_events;
    config.photos_per_event_min = 10;
    config.photos_per_event_max = 14;
    config.users_per_event = 6;
    config.ambiguity = 1.5;
    config.seed = 7;
    return evdet::generate(config);
}

void bench_ppr_solve(benchmark::State& state) {
    const int num_events = static_cast<int>(state.range(0));
    evdet::SynthDataset data = make_dataset(num_events);
    evdet::GraphConfig config;
    evdet::SocialGraph graph = evdet::SocialGraph::build(data.photos, data.interactions, config);
    std::vector<int> sources;
    for (const evdet::Photo& p : data.photos.photos()) {
        sources.push_back(*graph.photo_node(p.photo_id));
    }
    std::size_t next = 0;
    for (auto _ : state) {
        std::vector<double> v =
            evdet::personalized_pagerank(graph, sources[next % sources.size()], config);
        benchmark::DoNotOptimize(v.data());
        ++next;
    }
    state.counters["nodes"] = static_cast<double>(graph.node_count());
}

void bench_pair_features_metadata(benchmark::State& state) {
    const int num_events = static_cast<int>(state.range(0));
    evdet::SynthDataset data = make_dataset(num_events);
    evdet::PipelineConfig config;
    evdet::FeatureToggles toggles;
    toggles.enable_social = false;
    evdet::FeaturePipeline pipeline(data.photos, data.interactions, config, toggles);
    const auto& photos = data.photos.photos();
    std::size_t i = 0, j = photos.size() / 2;
    for (auto _ : state) {
        evdet::FeatureVector fv =
            pipeline.features(photos[i % photos.size()], photos[j % photos.size()]);
        benchmark::DoNotOptimize(fv);
        ++i;
        j += 3;
    }
}

void bench_pair_features_with_social(benchmark::State& state) {
    const int num_events = static_cast<int>(state.range(0));
    evdet::SynthDataset data = make_dataset(num_events);
    evdet::PipelineConfig config;
    evdet::FeaturePipeline pipeline(data.photos, data.interactions, config, config.toggles);
    const auto& photos = data.photos.photos();
    // One full pass so every photo's walk vector is already cached; the loop
    // then measures steady-state pair scoring rather than first-touch solves.
    for (std::size_t w = 1; w < photos.size(); ++w) {
        benchmark::DoNotOptimize(pipeline.features(photos[0], photos[w]));
    }
    std::size_t i = 0, j = photos.size() / 2;
    for (auto _ : state) {
        evdet::FeatureVector fv =
            pipeline.features(photos[i % photos.size()], photos[j % photos.size()]);
        benchmark::DoNotOptimize(fv);
        ++i;
        j += 3;
    }
}

void bench_incremental_cluster(benchmark::State& state) {
    const int num_events = static_cast<int>(state.range(0));
    evdet::SynthDataset data = make_dataset(num_events);
    evdet::PhotoStream stream = evdet::order_stream(data.photos, evdet::StreamOrderKey::UploadTime);
    // Metadata-only scorer keeps the benchmark focused on the scan itself.
    evdet::FeatureScales scales;
    evdet::PairSimilarityFn theta = [&scales](const evdet::Photo& a, const evdet::Photo& b) {
        return evdet::time_similarity(a.upload_time, b.upload_time, scales.tau_seconds);
    };
    for (auto _ : state) {
        evdet::Clustering result = evdet::incremental_cluster(stream, theta, 0.5, {});
        benchmark::DoNotOptimize(result.clusters.data());
    }
    state.counters["photos"] = static_cast<double>(stream.photos.size());
}

void bench_train(benchmark::State& state) {
    const int epochs = static_cast<int>(state.range(0));
    evdet::SynthDataset data = make_dataset(8);
    evdet::PipelineConfig config;
    std::vector<evdet::TrainingPair> pairs = evdet::sample_pairs(data.photos, config.sampling);
    evdet::FeaturePipeline pipeline(data.photos, data.interactions, config, config.toggles);
    for (evdet::TrainingPair& pair : pairs) {
        pair.features = pipeline.features(*data.photos.find(pair.photo_id_i),
                                          *data.photos.find(pair.photo_id_j));
    }
    std::vector<std::string> names = evdet::feature_names(config.toggles);
    evdet::TrainConfig train_config = config.training;
    train_config.epochs = epochs;
    for (auto _ : state) {
        evdet::SimilarityModel model = evdet::train(pairs, names, train_config, "bench");
        benchmark::DoNotOptimize(model.weights.data());
    }
    state.counters["pairs"] = static_cast<double>(pairs.size());
}

BENCHMARK(bench_ppr_solve)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(bench_pair_features_metadata)->Arg(8)->Arg(32);
BENCHMARK(bench_pair_features_with_social)->Arg(8)->Arg(32);
BENCHMARK(bench_incremental_cluster)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(bench_train)->Arg(1)->Arg(10);

}  // namespace

BENCHMARK_MAIN();
