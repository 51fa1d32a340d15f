#include "evdet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "json.hpp"

namespace evdet {

using nlohmann::json;

void SynthConfig::validate() const {
    if (num_events < 1) throw std::runtime_error("synth config: num_events must be >= 1");
    if (photos_per_event_min < 1) {
        throw std::runtime_error("synth config: photos_per_event_min must be >= 1");
    }
    if (photos_per_event_min > photos_per_event_max) {
        throw std::runtime_error("synth config: photos_per_event min > max");
    }
    if (users_per_event < 1) throw std::runtime_error("synth config: users_per_event must be >= 1");
    if (time_center_spread_days < 0.0 || within_event_sigma_hours < 0.0 ||
        within_event_sigma_km < 0.0) {
        throw std::runtime_error("synth config: spreads must be >= 0");
    }
    if (lat_min < -90.0 || lat_max > 90.0 || lat_min >= lat_max) {
        throw std::runtime_error("synth config: invalid latitude box");
    }
    if (lon_min < -180.0 || lon_max > 180.0 || lon_min >= lon_max) {
        throw std::runtime_error("synth config: invalid longitude box");
    }
    if (event_tag_vocab < tags_per_photo) {
        throw std::runtime_error("synth config: event_tag_vocab must cover tags_per_photo");
    }
    if (tags_per_photo < 0 || noise_tag_vocab < 0 || noise_tags_per_photo < 0.0) {
        throw std::runtime_error("synth config: tag counts must be >= 0");
    }
    if (geo_missing_rate < 0.0 || geo_missing_rate > 1.0) {
        throw std::runtime_error("synth config: geo_missing_rate must be in [0,1]");
    }
    if (p_comment_in < 0.0 || p_comment_in > 1.0 || p_comment_out < 0.0 || p_comment_out > 1.0) {
        throw std::runtime_error("synth config: comment probabilities must be in [0,1]");
    }
    if (p_comment_in < p_comment_out) {
        throw std::runtime_error("synth config: p_comment_in must be >= p_comment_out");
    }
    if (ambiguity < 0.0) throw std::runtime_error("synth config: ambiguity must be >= 0");
}

namespace {

// Local-degree approximation for km -> degree conversion.
constexpr double kKmPerDegreeLat = 110.574;
constexpr double kKmPerDegreeLonAtEquator = 111.320;
constexpr std::int64_t kBaseEpoch = 1700000000;  // arbitrary fixed origin
constexpr std::int64_t kMaxUploadDelaySeconds = 48 * 3600;

std::string id_prefix(std::uint64_t seed) { return "s" + std::to_string(seed); }

std::string format_index(const char* kind, std::size_t index) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%s%05zu", kind, index);
    return buf;
}

/// Sample `count` distinct indices from [0, size) by partial Fisher-Yates.
std::vector<int> sample_distinct(std::mt19937_64& rng, int size, int count) {
    count = std::min(count, size);
    std::vector<int> indices(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) indices[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < count; ++i) {
        std::uniform_int_distribution<int> pick(i, size - 1);
        std::swap(indices[static_cast<std::size_t>(i)], indices[static_cast<std::size_t>(pick(rng))]);
    }
    indices.resize(static_cast<std::size_t>(count));
    return indices;
}

}  // namespace

SynthDataset generate(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int k = config.num_events;
    const std::string prefix = id_prefix(config.seed);

    // Event centers.
    std::vector<std::int64_t> time_centers(static_cast<std::size_t>(k));
    std::vector<double> lat_centers(static_cast<std::size_t>(k));
    std::vector<double> lon_centers(static_cast<std::size_t>(k));
    for (int e = 0; e < k; ++e) {
        time_centers[static_cast<std::size_t>(e)] =
            kBaseEpoch +
            static_cast<std::int64_t>(unit(rng) * config.time_center_spread_days * 86400.0);
        lat_centers[static_cast<std::size_t>(e)] =
            config.lat_min + unit(rng) * (config.lat_max - config.lat_min);
        lon_centers[static_cast<std::size_t>(e)] =
            config.lon_min + unit(rng) * (config.lon_max - config.lon_min);
    }

    // Disjoint per-event tag vocabularies plus one shared noise vocabulary.
    auto event_tag = [&](int e, int t) {
        return "e" + std::to_string(e) + "t" + std::to_string(t);
    };
    auto noise_tag = [&](int t) { return "n" + std::to_string(t); };

    // Users partitioned across events; every user attends exactly one event.
    const int total_users = k * config.users_per_event;
    auto user_of = [&](int e, int slot) {
        return prefix + "-" + format_index("u", static_cast<std::size_t>(e * config.users_per_event + slot));
    };
    std::vector<int> event_of_user(static_cast<std::size_t>(total_users));
    for (int e = 0; e < k; ++e) {
        for (int s = 0; s < config.users_per_event; ++s) {
            event_of_user[static_cast<std::size_t>(e * config.users_per_event + s)] = e;
        }
    }

    const double sigma_seconds = config.within_event_sigma_hours * 3600.0 * config.ambiguity;
    const double sigma_km = config.within_event_sigma_km * config.ambiguity;
    const int noise_tags =
        std::min(static_cast<int>(std::llround(config.noise_tags_per_photo * config.ambiguity)),
                 config.noise_tag_vocab);
    const int title_noise_words =
        std::min(static_cast<int>(std::llround(config.ambiguity)), config.noise_tag_vocab);
    const int desc_noise_words =
        std::min(static_cast<int>(std::llround(2.0 * config.ambiguity)), config.noise_tag_vocab);

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Photo> photos;
    std::vector<int> event_of_photo;
    std::size_t photo_counter = 0;
    for (int e = 0; e < k; ++e) {
        const std::size_t ei = static_cast<std::size_t>(e);
        int count = config.photos_per_event_min;
        if (config.photos_per_event_max > config.photos_per_event_min) {
            std::uniform_int_distribution<int> pick(config.photos_per_event_min,
                                                    config.photos_per_event_max);
            count = pick(rng);
        }
        const double lat_c = lat_centers[ei];
        const double lon_c = lon_centers[ei];
        const double lat_sigma_deg = sigma_km / kKmPerDegreeLat;
        const double cos_lat = std::max(std::cos(lat_c * std::numbers::pi / 180.0), 0.01);
        const double lon_sigma_deg = sigma_km / (kKmPerDegreeLonAtEquator * cos_lat);

        for (int i = 0; i < count; ++i) {
            Photo p;
            p.photo_id = prefix + "-" + format_index("p", photo_counter++);
            std::uniform_int_distribution<int> owner_pick(0, config.users_per_event - 1);
            p.user_id = user_of(e, owner_pick(rng));
            p.taken_time =
                time_centers[ei] + static_cast<std::int64_t>(std::llround(gauss(rng) * sigma_seconds));
            p.upload_time =
                p.taken_time + static_cast<std::int64_t>(unit(rng) * kMaxUploadDelaySeconds);
            if (unit(rng) >= config.geo_missing_rate) {
                p.latitude = std::clamp(lat_c + gauss(rng) * lat_sigma_deg, -90.0, 90.0);
                p.longitude = std::clamp(lon_c + gauss(rng) * lon_sigma_deg, -180.0, 180.0);
            }
            for (int t : sample_distinct(rng, config.event_tag_vocab, config.tags_per_photo)) {
                p.tags.push_back(event_tag(e, t));
            }
            for (int t : sample_distinct(rng, config.noise_tag_vocab, noise_tags)) {
                p.tags.push_back(noise_tag(t));
            }
            std::string title, description;
            std::uniform_int_distribution<int> word_pick(0, config.event_tag_vocab - 1);
            for (int wi = 0; wi < 2; ++wi) {
                if (!title.empty()) title += ' ';
                title += event_tag(e, word_pick(rng));
            }
            for (int t : sample_distinct(rng, config.noise_tag_vocab, title_noise_words)) {
                title += ' ';
                title += noise_tag(t);
            }
            for (int wi = 0; wi < 3; ++wi) {
                if (!description.empty()) description += ' ';
                description += event_tag(e, word_pick(rng));
            }
            for (int t : sample_distinct(rng, config.noise_tag_vocab, desc_noise_words)) {
                description += ' ';
                description += noise_tag(t);
            }
            p.title = std::move(title);
            p.description = std::move(description);
            p.event_id = "e" + std::to_string(e);
            photos.push_back(std::move(p));
            event_of_photo.push_back(e);
        }
    }

    // Comments: one Bernoulli draw per (user, photo) in a fixed order.
    InteractionLog interactions;
    for (int u = 0; u < total_users; ++u) {
        const int attended = event_of_user[static_cast<std::size_t>(u)];
        const std::string user_id =
            user_of(attended, u - attended * config.users_per_event);
        for (std::size_t pi = 0; pi < photos.size(); ++pi) {
            const double p_comment =
                event_of_photo[pi] == attended ? config.p_comment_in : config.p_comment_out;
            if (unit(rng) < p_comment) {
                Interaction x;
                x.kind = InteractionKind::Comment;
                x.user_id = user_id;
                x.photo_id = photos[pi].photo_id;
                x.time = photos[pi].upload_time +
                         static_cast<std::int64_t>(3600.0 + unit(rng) * (71.0 * 3600.0));
                interactions.push_back(std::move(x));
            }
        }
    }

    return SynthDataset{PhotoCollection(std::move(photos)), std::move(interactions)};
}

std::string SynthConfig::to_json_string() const {
    json obj;
    obj["num_events"] = num_events;
    obj["photos_per_event_min"] = photos_per_event_min;
    obj["photos_per_event_max"] = photos_per_event_max;
    obj["users_per_event"] = users_per_event;
    obj["time_center_spread_days"] = time_center_spread_days;
    obj["within_event_sigma_hours"] = within_event_sigma_hours;
    obj["lat_min"] = lat_min;
    obj["lat_max"] = lat_max;
    obj["lon_min"] = lon_min;
    obj["lon_max"] = lon_max;
    obj["within_event_sigma_km"] = within_event_sigma_km;
    obj["event_tag_vocab"] = event_tag_vocab;
    obj["noise_tag_vocab"] = noise_tag_vocab;
    obj["tags_per_photo"] = tags_per_photo;
    obj["noise_tags_per_photo"] = noise_tags_per_photo;
    obj["geo_missing_rate"] = geo_missing_rate;
    obj["p_comment_in"] = p_comment_in;
    obj["p_comment_out"] = p_comment_out;
    obj["ambiguity"] = ambiguity;
    obj["seed"] = seed;
    return obj.dump(2) + "\n";
}

SynthConfig SynthConfig::from_json_string(const std::string& text) {
    json obj = json::parse(text);
    SynthConfig c;
    c.num_events = obj.value("num_events", c.num_events);
    c.photos_per_event_min = obj.value("photos_per_event_min", c.photos_per_event_min);
    c.photos_per_event_max = obj.value("photos_per_event_max", c.photos_per_event_max);
    c.users_per_event = obj.value("users_per_event", c.users_per_event);
    c.time_center_spread_days = obj.value("time_center_spread_days", c.time_center_spread_days);
    c.within_event_sigma_hours = obj.value("within_event_sigma_hours", c.within_event_sigma_hours);
    c.lat_min = obj.value("lat_min", c.lat_min);
    c.lat_max = obj.value("lat_max", c.lat_max);
    c.lon_min = obj.value("lon_min", c.lon_min);
    c.lon_max = obj.value("lon_max", c.lon_max);
    c.within_event_sigma_km = obj.value("within_event_sigma_km", c.within_event_sigma_km);
    c.event_tag_vocab = obj.value("event_tag_vocab", c.event_tag_vocab);
    c.noise_tag_vocab = obj.value("noise_tag_vocab", c.noise_tag_vocab);
    c.tags_per_photo = obj.value("tags_per_photo", c.tags_per_photo);
    c.noise_tags_per_photo = obj.value("noise_tags_per_photo", c.noise_tags_per_photo);
    c.geo_missing_rate = obj.value("geo_missing_rate", c.geo_missing_rate);
    c.p_comment_in = obj.value("p_comment_in", c.p_comment_in);
    c.p_comment_out = obj.value("p_comment_out", c.p_comment_out);
    c.ambiguity = obj.value("ambiguity", c.ambiguity);
    c.seed = obj.value("seed", c.seed);
    c.validate();
    return c;
}

}  // namespace evdet
