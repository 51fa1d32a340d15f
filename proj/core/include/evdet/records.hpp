#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace evdet {

/// One photo record with its upload/capture metadata. Tags are stored
/// normalized (lowercase, trimmed, no empties). latitude and longitude are
/// either both present or both absent.
struct Photo {
    std::string photo_id;
    std::string user_id;
    std::int64_t taken_time = 0;
    std::int64_t upload_time = 0;
    std::optional<double> latitude;
    std::optional<double> longitude;
    std::vector<std::string> tags;
    std::optional<std::string> title;
    std::optional<std::string> description;
    std::optional<std::string> event_id;  // ground truth, when known

    bool has_location() const { return latitude.has_value() && longitude.has_value(); }

    bool operator==(const Photo&) const = default;
};

enum class InteractionKind { Comment, Favorite };

const char* to_string(InteractionKind kind);
InteractionKind interaction_kind_from_string(const std::string& s);

struct Interaction {
    InteractionKind kind = InteractionKind::Comment;
    std::string user_id;
    std::string photo_id;
    std::int64_t time = 0;

    bool operator==(const Interaction&) const = default;
};

using InteractionLog = std::vector<Interaction>;

/// Photos in input order with a photo_id -> position index.
class PhotoCollection {
public:
    PhotoCollection() = default;
    explicit PhotoCollection(std::vector<Photo> photos);

    const std::vector<Photo>& photos() const { return photos_; }
    std::size_t size() const { return photos_.size(); }
    bool empty() const { return photos_.empty(); }

    const Photo* find(const std::string& photo_id) const;

    bool operator==(const PhotoCollection& other) const { return photos_ == other.photos_; }

private:
    std::vector<Photo> photos_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// Which time stamp orders the stream. Upload order models arrival at the
/// service and is the default; ties break on photo_id.
enum class StreamOrderKey { UploadTime, TakenTime };

/// Photos in processing order (ascending key, then photo_id).
struct PhotoStream {
    std::vector<Photo> photos;
};

// Parsing. Input is UTF-8, one flat JSON object per line. Blank lines are
// skipped. Errors carry the 1-based line number.
PhotoCollection parse_photo_records(std::istream& in);
PhotoCollection parse_photo_records_file(const std::filesystem::path& path);
InteractionLog parse_interactions(std::istream& in);
InteractionLog parse_interactions_file(const std::filesystem::path& path);

// Serialization, one JSON line per record, keys in a fixed order so equal
// inputs produce byte-equal files.
std::string serialize_photo(const Photo& photo);
std::string serialize_interaction(const Interaction& interaction);
void write_photo_records(std::ostream& out, const PhotoCollection& photos);
void write_interactions(std::ostream& out, const InteractionLog& log);

/// Sorts the collection into processing order. Idempotent.
PhotoStream order_stream(const PhotoCollection& collection,
                         StreamOrderKey key = StreamOrderKey::UploadTime);

/// Tag normalization used by the parser: lowercase, trim surrounding
/// whitespace. Returns an empty string for all-whitespace input.
std::string normalize_tag(std::string_view raw);

}  // namespace evdet
