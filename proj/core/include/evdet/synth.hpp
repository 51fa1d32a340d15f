#pragma once

#include <cstdint>
#include <string>

#include "evdet/records.hpp"

namespace evdet {

/// Planted-event generator configuration. Ambiguity scales the within-event
/// time/geo spreads and the per-photo noise-tag share: 0 plants perfectly
/// separated events, larger values blur them together.
struct SynthConfig {
    int num_events = 8;
    int photos_per_event_min = 10;
    int photos_per_event_max = 14;
    int users_per_event = 6;

    double time_center_spread_days = 90.0;
    double within_event_sigma_hours = 6.0;

    // Bounding box for event geo centers.
    double lat_min = 36.0;
    double lat_max = 55.0;
    double lon_min = -10.0;
    double lon_max = 25.0;
    double within_event_sigma_km = 5.0;

    int event_tag_vocab = 8;   // per-event tag vocabulary size
    int noise_tag_vocab = 40;  // shared noise vocabulary size
    int tags_per_photo = 3;    // event tags per photo
    double noise_tags_per_photo = 2.0;  // base noise-tag share, scaled by ambiguity

    double geo_missing_rate = 0.0;
    double p_comment_in = 0.2;    // user comments on a photo of an attended event
    double p_comment_out = 0.01;  // ... of an event they did not attend
    double ambiguity = 1.0;
    std::uint64_t seed = 1;

    void validate() const;

    std::string to_json_string() const;
    static SynthConfig from_json_string(const std::string& text);

    bool operator==(const SynthConfig&) const = default;
};

struct SynthDataset {
    PhotoCollection photos;  // every photo carries its ground-truth event_id
    InteractionLog interactions;
};

/// Deterministic per seed. Photo ids embed the seed, so distinct seeds
/// produce distinct id sequences.
SynthDataset generate(const SynthConfig& config);

}  // namespace evdet
