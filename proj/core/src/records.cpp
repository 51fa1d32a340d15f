#include "evdet/records.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

namespace evdet {

using nlohmann::json;

const char* to_string(InteractionKind kind) {
    switch (kind) {
        case InteractionKind::Comment: return "comment";
        case InteractionKind::Favorite: return "favorite";
    }
    throw std::logic_error("invalid InteractionKind");
}

InteractionKind interaction_kind_from_string(const std::string& s) {
    if (s == "comment") return InteractionKind::Comment;
    if (s == "favorite") return InteractionKind::Favorite;
    throw std::runtime_error("unknown interaction kind '" + s + "'");
}

PhotoCollection::PhotoCollection(std::vector<Photo> photos) : photos_(std::move(photos)) {
    by_id_.reserve(photos_.size());
    for (std::size_t i = 0; i < photos_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(photos_[i].photo_id, i);
        if (!inserted) {
            throw std::runtime_error("duplicate photo_id '" + photos_[i].photo_id + "'");
        }
    }
}

const Photo* PhotoCollection::find(const std::string& photo_id) const {
    auto it = by_id_.find(photo_id);
    return it == by_id_.end() ? nullptr : &photos_[it->second];
}

std::string normalize_tag(std::string_view raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out(raw.substr(begin, end - begin));
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

namespace {

[[noreturn]] void fail_line(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

json parse_line_object(const std::string& line, std::size_t line_no) {
    json value = json::parse(line, nullptr, false);
    if (value.is_discarded() || !value.is_object()) {
        fail_line(line_no, "malformed record (expected one JSON object per line)");
    }
    return value;
}

std::int64_t require_int(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number_integer()) {
        fail_line(line_no, std::string("missing or non-integer field '") + key + "'");
    }
    return it->get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        fail_line(line_no, std::string("missing or non-string field '") + key + "'");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) fail_line(line_no, std::string("field '") + key + "' must be a string");
    return it->get<std::string>();
}

std::optional<double> optional_number(const json& obj, const char* key, std::size_t line_no) {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) fail_line(line_no, std::string("field '") + key + "' must be a number");
    return it->get<double>();
}

Photo photo_from_json(const json& obj, std::size_t line_no) {
    Photo p;
    p.photo_id = require_string(obj, "photo_id", line_no);
    p.user_id = require_string(obj, "user_id", line_no);
    p.taken_time = require_int(obj, "taken_time", line_no);
    p.upload_time = require_int(obj, "upload_time", line_no);
    p.latitude = optional_number(obj, "latitude", line_no);
    p.longitude = optional_number(obj, "longitude", line_no);
    if (p.latitude.has_value() != p.longitude.has_value()) {
        fail_line(line_no, "photo '" + p.photo_id + "' has latitude without longitude (or vice versa)");
    }
    if (p.latitude && (*p.latitude < -90.0 || *p.latitude > 90.0)) {
        fail_line(line_no, "latitude out of range [-90,90]");
    }
    if (p.longitude && (*p.longitude < -180.0 || *p.longitude > 180.0)) {
        fail_line(line_no, "longitude out of range [-180,180]");
    }
    if (auto it = obj.find("tags"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) fail_line(line_no, "field 'tags' must be an array of strings");
        for (const auto& t : *it) {
            if (!t.is_string()) fail_line(line_no, "field 'tags' must be an array of strings");
            std::string tag = normalize_tag(t.get<std::string>());
            if (!tag.empty()) p.tags.push_back(std::move(tag));
        }
    }
    p.title = optional_string(obj, "title", line_no);
    p.description = optional_string(obj, "description", line_no);
    p.event_id = optional_string(obj, "event_id", line_no);
    return p;
}

Interaction interaction_from_json(const json& obj, std::size_t line_no) {
    Interaction x;
    std::string kind = require_string(obj, "kind", line_no);
    try {
        x.kind = interaction_kind_from_string(kind);
    } catch (const std::exception& e) {
        fail_line(line_no, e.what());
    }
    x.user_id = require_string(obj, "user_id", line_no);
    x.photo_id = require_string(obj, "photo_id", line_no);
    x.time = require_int(obj, "time", line_no);
    return x;
}

}  // namespace

PhotoCollection parse_photo_records(std::istream& in) {
    std::vector<Photo> photos;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        Photo p = photo_from_json(parse_line_object(line, line_no), line_no);
        if (!seen.insert(p.photo_id).second) {
            fail_line(line_no, "duplicate photo_id '" + p.photo_id + "'");
        }
        photos.push_back(std::move(p));
    }
    return PhotoCollection(std::move(photos));
}

PhotoCollection parse_photo_records_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open photo file '" + path.string() + "'");
    try {
        return parse_photo_records(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

InteractionLog parse_interactions(std::istream& in) {
    InteractionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        log.push_back(interaction_from_json(parse_line_object(line, line_no), line_no));
    }
    return log;
}

InteractionLog parse_interactions_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open interaction file '" + path.string() + "'");
    try {
        return parse_interactions(in);
    } catch (const std::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

std::string serialize_photo(const Photo& photo) {
    json obj;
    obj["photo_id"] = photo.photo_id;
    obj["user_id"] = photo.user_id;
    obj["taken_time"] = photo.taken_time;
    obj["upload_time"] = photo.upload_time;
    if (photo.latitude) obj["latitude"] = *photo.latitude;
    if (photo.longitude) obj["longitude"] = *photo.longitude;
    obj["tags"] = photo.tags;
    if (photo.title) obj["title"] = *photo.title;
    if (photo.description) obj["description"] = *photo.description;
    if (photo.event_id) obj["event_id"] = *photo.event_id;
    return obj.dump();
}

std::string serialize_interaction(const Interaction& interaction) {
    json obj;
    obj["kind"] = to_string(interaction.kind);
    obj["user_id"] = interaction.user_id;
    obj["photo_id"] = interaction.photo_id;
    obj["time"] = interaction.time;
    return obj.dump();
}

void write_photo_records(std::ostream& out, const PhotoCollection& photos) {
    for (const Photo& p : photos.photos()) out << serialize_photo(p) << '\n';
}

void write_interactions(std::ostream& out, const InteractionLog& log) {
    for (const Interaction& x : log) out << serialize_interaction(x) << '\n';
}

PhotoStream order_stream(const PhotoCollection& collection, StreamOrderKey key) {
    PhotoStream stream;
    stream.photos = collection.photos();
    auto time_of = [key](const Photo& p) {
        return key == StreamOrderKey::UploadTime ? p.upload_time : p.taken_time;
    };
    std::stable_sort(stream.photos.begin(), stream.photos.end(),
                     [&](const Photo& a, const Photo& b) {
                         if (time_of(a) != time_of(b)) return time_of(a) < time_of(b);
                         return a.photo_id < b.photo_id;
                     });
    return stream;
}

}  // namespace evdet
