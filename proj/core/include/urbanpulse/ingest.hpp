#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "urbanpulse/geo.hpp"

namespace urbanpulse::ingest {

/// An ISO-8601 timestamp kept verbatim.
///
/// When the text carries a zone designator (Z or +hh:mm) the instant is also
/// resolved to UTC milliseconds; zone-less values are local times and compare
/// lexicographically.
struct Timestamp {
    std::string text;
    std::optional<std::int64_t> utc_millis;

    /// Accepts YYYY-MM-DD with an optional [T ]hh:mm[:ss[.fff]] and zone.
    static std::optional<Timestamp> parse(std::string_view text);

    /// The YYYY-MM-DD prefix.
    std::string_view date() const { return std::string_view(text).substr(0, 10); }
};

/// Strict weak order: UTC instants when both sides have one, text otherwise.
bool earlier(const Timestamp& a, const Timestamp& b);

struct CheckIn {
    std::string user_id;
    std::string venue_id;
    std::string beer_style;
    geo::GeoPoint location;
    Timestamp timestamp;

    /// venue_id, or the coordinates rounded to 5 decimals when it is empty.
    std::string venue_key() const;
};

struct Report {
    std::string report_id;
    std::string subject;
    std::string subdivision;
    Timestamp timestamp;
    std::string comment_text;
    geo::GeoPoint location;
};

struct Comment {
    std::string comment_id;
    std::string article_id;
    std::string text;
    std::optional<Timestamp> timestamp;
};

struct Rejected {
    std::size_t line = 0;
    std::string reason;
    std::string raw;
};

template <typename T>
struct Parsed {
    std::vector<T> records;
    std::vector<Rejected> rejects;
};

enum class Format { Delimited, JsonLines };

/// Maps the logical field names a parser needs onto the columns (or JSON keys)
/// of a concrete export. Unmapped fields use their logical name.
///
/// Mapping files hold `key=column` pairs, one per line, `#` comments allowed.
/// Two reserved keys select the container: `format=csv|jsonl` and
/// `delimiter=<char>|tab`.
class Schema {
public:
    Schema() = default;

    static Schema parse(std::istream& in, const std::string& source = "<schema>");
    static Schema load(const std::filesystem::path& path);

    Format format() const { return format_; }
    char delimiter() const { return delimiter_; }

    /// Source column for a logical field.
    std::string column(const std::string& field) const;
    bool is_explicit(const std::string& field) const { return columns_.contains(field); }

    Schema& set_column(const std::string& field, const std::string& column);
    Schema& set_format(Format f) { format_ = f; return *this; }
    Schema& set_delimiter(char d) { delimiter_ = d; return *this; }

    /// Throws ParseError if a mapped field is not one of `allowed`.
    void check_fields(const std::set<std::string>& allowed, const std::string& dataset) const;

private:
    Format format_ = Format::Delimited;
    char delimiter_ = ',';
    std::map<std::string, std::string> columns_;
};

/// Required: user_id, beer_style, lat, lon, timestamp. Optional: venue_id.
Parsed<CheckIn> parse_checkins(std::istream& in, const Schema& schema = {});
/// Required: report_id, subdivision, lat, lon, timestamp. Optional: subject, comment_text.
Parsed<Report> parse_reports(std::istream& in, const Schema& schema = {});
/// Required: comment_id, text. Optional: article_id, timestamp.
Parsed<Comment> parse_comments(std::istream& in, const Schema& schema = {});

Parsed<CheckIn> read_checkins(const std::filesystem::path& path, const Schema& schema = {});
Parsed<Report> read_reports(const std::filesystem::path& path, const Schema& schema = {});
Parsed<Comment> read_comments(const std::filesystem::path& path, const Schema& schema = {});

/// One check-in per (user_id, venue_key): the earliest, first seen on ties.
/// Output is sorted by user_id, then venue_key.
std::vector<CheckIn> dedupe_checkins(const std::vector<CheckIn>& records);

/// Keeps reports whose date lies in [from, to]; either bound may be absent.
/// Bounds are YYYY-MM-DD; anything else throws InvalidInput.
std::vector<Report> filter_by_date(const std::vector<Report>& reports, const std::optional<std::string>& from,
                                   const std::optional<std::string>& to);

}  // namespace urbanpulse::ingest
