#include "urbanpulse/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <chrono>
#include <fstream>
#include <functional>
#include <tuple>
#include <variant>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "urbanpulse/delimited.hpp"
#include "urbanpulse/error.hpp"
#include "urbanpulse/text.hpp"

namespace urbanpulse::ingest {
namespace {

using FieldGetter = std::function<std::string(const std::string&)>;
template <typename T>
using BuildResult = std::variant<T, std::string>;

bool parse_int(std::string_view s, int& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::optional<double> parse_double(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

// Parses "lat"/"lon" fields into a point or a reject reason.
std::variant<geo::GeoPoint, std::string> parse_location(const std::string& lat_text, const std::string& lon_text) {
    const std::string lat_s = text::trim(lat_text);
    const std::string lon_s = text::trim(lon_text);
    if (lat_s.empty() || lon_s.empty()) {
        return std::string("missing coordinate");
    }
    const auto lat = parse_double(lat_s);
    const auto lon = parse_double(lon_s);
    if (!lat || !lon) {
        return std::string("malformed coordinate");
    }
    if (!geo::GeoPoint::is_valid(*lat, *lon)) {
        return std::string("coordinate out of range");
    }
    return geo::GeoPoint(*lat, *lon);
}

std::variant<Timestamp, std::string> require_timestamp(const std::string& raw) {
    const std::string t = text::trim(raw);
    if (t.empty()) {
        return std::string("missing timestamp");
    }
    auto ts = Timestamp::parse(t);
    if (!ts) {
        return std::string("malformed timestamp");
    }
    return *ts;
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open input file: " + path.string());
    }
    return in;
}

template <typename T, typename Build>
Parsed<T> parse_rows(std::istream& in, const Schema& schema, const std::string& dataset,
                     const std::vector<std::string>& required, const std::vector<std::string>& optional,
                     Build build) {
    std::set<std::string> allowed(required.begin(), required.end());
    allowed.insert(optional.begin(), optional.end());
    schema.check_fields(allowed, dataset);

    Parsed<T> out;
    auto accept = [&](std::size_t line, const std::string& raw, const FieldGetter& get) {
        BuildResult<T> result = build(get);
        if (auto* rec = std::get_if<T>(&result)) {
            out.records.push_back(std::move(*rec));
        } else {
            out.rejects.push_back({line, std::get<std::string>(result), raw});
        }
    };

    if (schema.format() == Format::JsonLines) {
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') {
                line.pop_back();
            }
            if (text::trim(line).empty()) {
                continue;
            }
            if (!text::is_valid_utf8(line)) {
                out.rejects.push_back({line_no, "invalid utf-8", line});
                continue;
            }
            const auto doc = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
            if (doc.is_discarded() || !doc.is_object()) {
                out.rejects.push_back({line_no, "malformed record: not a JSON object", line});
                continue;
            }
            accept(line_no, line, [&](const std::string& field) -> std::string {
                const auto it = doc.find(schema.column(field));
                if (it == doc.end() || it->is_null()) {
                    return {};
                }
                return it->is_string() ? it->get<std::string>() : it->dump();
            });
        }
        return out;
    }

    delimited::Reader reader(in, schema.delimiter());
    auto header = reader.next();
    if (!header) {
        return out;
    }
    if (!header->error.empty()) {
        throw ParseError(dataset, header->line, "malformed header: " + header->error);
    }
    if (!header->fields.empty() && header->fields.front().starts_with("\xEF\xBB\xBF")) {
        header->fields.front().erase(0, 3);
    }
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header->fields.size(); ++i) {
        index.emplace(text::trim(header->fields[i]), i);
    }
    std::map<std::string, std::size_t> field_index;
    for (const auto& f : required) {
        const auto it = index.find(schema.column(f));
        if (it == index.end()) {
            throw ParseError(dataset, header->line, "missing required column '" + schema.column(f) + "'");
        }
        field_index[f] = it->second;
    }
    for (const auto& f : optional) {
        const auto it = index.find(schema.column(f));
        if (it != index.end()) {
            field_index[f] = it->second;
        } else if (schema.is_explicit(f)) {
            throw ParseError(dataset, header->line, "mapped column '" + schema.column(f) + "' not in header");
        }
    }

    const std::size_t width = header->fields.size();
    while (auto rec = reader.next()) {
        if (!text::is_valid_utf8(rec->raw)) {
            out.rejects.push_back({rec->line, "invalid utf-8", rec->raw});
            continue;
        }
        if (!rec->error.empty()) {
            out.rejects.push_back({rec->line, "malformed record: " + rec->error, rec->raw});
            continue;
        }
        if (rec->fields.size() != width) {
            out.rejects.push_back(
                {rec->line, fmt::format("malformed record: expected {} fields, got {}", width, rec->fields.size()),
                 rec->raw});
            continue;
        }
        accept(rec->line, rec->raw, [&](const std::string& field) -> std::string {
            const auto it = field_index.find(field);
            return it == field_index.end() ? std::string{} : rec->fields[it->second];
        });
    }
    return out;
}

}  // namespace

std::optional<Timestamp> Timestamp::parse(std::string_view text) {
    using namespace std::chrono;
    if (text.size() < 10 || text[4] != '-' || text[7] != '-') {
        return std::nullopt;
    }
    int y = 0;
    int mo = 0;
    int d = 0;
    if (!all_digits(text.substr(0, 4)) || !all_digits(text.substr(5, 2)) || !all_digits(text.substr(8, 2)) ||
        !parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), mo) || !parse_int(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) {
        return std::nullopt;
    }

    int hh = 0;
    int mm = 0;
    int ss = 0;
    int millis = 0;
    std::string_view rest = text.substr(10);
    if (!rest.empty() && (rest.front() == 'T' || rest.front() == ' ')) {
        rest.remove_prefix(1);
        if (rest.size() < 5 || rest[2] != ':' || !all_digits(rest.substr(0, 2)) || !all_digits(rest.substr(3, 2))) {
            return std::nullopt;
        }
        parse_int(rest.substr(0, 2), hh);
        parse_int(rest.substr(3, 2), mm);
        rest.remove_prefix(5);
        if (!rest.empty() && rest.front() == ':') {
            if (rest.size() < 3 || !all_digits(rest.substr(1, 2))) {
                return std::nullopt;
            }
            parse_int(rest.substr(1, 2), ss);
            rest.remove_prefix(3);
            if (!rest.empty() && rest.front() == '.') {
                rest.remove_prefix(1);
                std::size_t n = 0;
                while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') {
                    ++n;
                }
                if (n == 0) {
                    return std::nullopt;
                }
                std::string frac(rest.substr(0, std::min<std::size_t>(n, 3)));
                frac.resize(3, '0');
                parse_int(frac, millis);
                rest.remove_prefix(n);
            }
        }
        if (hh > 23 || mm > 59 || ss > 60) {
            return std::nullopt;
        }
    }

    std::optional<int> offset_minutes;
    if (rest == "Z" || rest == "z") {
        offset_minutes = 0;
    } else if (!rest.empty() && (rest.front() == '+' || rest.front() == '-')) {
        const int sign = rest.front() == '-' ? -1 : 1;
        std::string_view z = rest.substr(1);
        int oh = 0;
        int om = 0;
        if (z.size() == 5 && z[2] == ':' && all_digits(z.substr(0, 2)) && all_digits(z.substr(3, 2))) {
            parse_int(z.substr(0, 2), oh);
            parse_int(z.substr(3, 2), om);
        } else if (z.size() == 4 && all_digits(z)) {
            parse_int(z.substr(0, 2), oh);
            parse_int(z.substr(2, 2), om);
        } else if (z.size() == 2 && all_digits(z)) {
            parse_int(z, oh);
        } else {
            return std::nullopt;
        }
        if (oh > 23 || om > 59) {
            return std::nullopt;
        }
        offset_minutes = sign * (oh * 60 + om);
    } else if (!rest.empty()) {
        return std::nullopt;
    }

    Timestamp ts;
    ts.text = std::string(text);
    if (offset_minutes) {
        const auto local = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss} + milliseconds{millis};
        ts.utc_millis = duration_cast<milliseconds>((local - minutes{*offset_minutes}).time_since_epoch()).count();
    }
    return ts;
}

bool earlier(const Timestamp& a, const Timestamp& b) {
    if (a.utc_millis && b.utc_millis) {
        return *a.utc_millis < *b.utc_millis;
    }
    return a.text < b.text;
}

std::string CheckIn::venue_key() const {
    if (!venue_id.empty()) {
        return venue_id;
    }
    return fmt::format("{:.5f},{:.5f}", location.lat(), location.lon());
}

Schema Schema::parse(std::istream& in, const std::string& source) {
    Schema schema;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = text::trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(source, line_no, "expected key=column");
        }
        const std::string key = text::trim(std::string_view(t).substr(0, eq));
        const std::string value = text::trim(std::string_view(t).substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ParseError(source, line_no, "empty key or column");
        }
        if (key == "format") {
            if (value == "csv" || value == "delimited") {
                schema.format_ = Format::Delimited;
            } else if (value == "jsonl" || value == "ndjson") {
                schema.format_ = Format::JsonLines;
            } else {
                throw ParseError(source, line_no, "unknown format '" + value + "'");
            }
        } else if (key == "delimiter") {
            if (value == "tab" || value == "\\t") {
                schema.delimiter_ = '\t';
            } else if (value.size() == 1 && value != "\"") {
                schema.delimiter_ = value.front();
            } else {
                throw ParseError(source, line_no, "delimiter must be a single character or 'tab'");
            }
        } else if (!schema.columns_.emplace(key, value).second) {
            throw ParseError(source, line_no, "duplicate key '" + key + "'");
        }
    }
    return schema;
}

Schema Schema::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open schema file: " + path.string());
    }
    return parse(in, path.string());
}

std::string Schema::column(const std::string& field) const {
    const auto it = columns_.find(field);
    return it == columns_.end() ? field : it->second;
}

Schema& Schema::set_column(const std::string& field, const std::string& column) {
    columns_[field] = column;
    return *this;
}

void Schema::check_fields(const std::set<std::string>& allowed, const std::string& dataset) const {
    for (const auto& [field, column] : columns_) {
        if (!allowed.contains(field)) {
            throw ParseError(dataset + " schema: unknown field '" + field + "'");
        }
    }
}

Parsed<CheckIn> parse_checkins(std::istream& in, const Schema& schema) {
    return parse_rows<CheckIn>(
        in, schema, "checkins", {"user_id", "beer_style", "lat", "lon", "timestamp"}, {"venue_id"},
        [](const FieldGetter& get) -> BuildResult<CheckIn> {
            CheckIn c;
            c.user_id = text::trim(get("user_id"));
            if (c.user_id.empty()) {
                return std::string("missing user");
            }
            c.beer_style = text::trim(get("beer_style"));
            if (c.beer_style.empty()) {
                return std::string("no beverage type");
            }
            auto loc = parse_location(get("lat"), get("lon"));
            if (auto* reason = std::get_if<std::string>(&loc)) {
                return *reason;
            }
            c.location = std::get<geo::GeoPoint>(loc);
            auto ts = require_timestamp(get("timestamp"));
            if (auto* reason = std::get_if<std::string>(&ts)) {
                return *reason;
            }
            c.timestamp = std::get<Timestamp>(std::move(ts));
            c.venue_id = text::trim(get("venue_id"));
            return c;
        });
}

Parsed<Report> parse_reports(std::istream& in, const Schema& schema) {
    return parse_rows<Report>(
        in, schema, "reports", {"report_id", "subdivision", "lat", "lon", "timestamp"}, {"subject", "comment_text"},
        [](const FieldGetter& get) -> BuildResult<Report> {
            Report r;
            r.report_id = text::trim(get("report_id"));
            if (r.report_id.empty()) {
                return std::string("missing report id");
            }
            r.subdivision = text::trim(get("subdivision"));
            if (r.subdivision.empty()) {
                return std::string("empty subdivision");
            }
            auto loc = parse_location(get("lat"), get("lon"));
            if (auto* reason = std::get_if<std::string>(&loc)) {
                return *reason;
            }
            r.location = std::get<geo::GeoPoint>(loc);
            auto ts = require_timestamp(get("timestamp"));
            if (auto* reason = std::get_if<std::string>(&ts)) {
                return *reason;
            }
            r.timestamp = std::get<Timestamp>(std::move(ts));
            r.subject = text::trim(get("subject"));
            r.comment_text = get("comment_text");
            return r;
        });
}

Parsed<Comment> parse_comments(std::istream& in, const Schema& schema) {
    return parse_rows<Comment>(in, schema, "comments", {"comment_id", "text"}, {"article_id", "timestamp"},
                               [](const FieldGetter& get) -> BuildResult<Comment> {
                                   Comment c;
                                   c.comment_id = text::trim(get("comment_id"));
                                   if (c.comment_id.empty()) {
                                       return std::string("missing comment id");
                                   }
                                   c.text = get("text");
                                   if (text::trim(c.text).empty()) {
                                       return std::string("empty text");
                                   }
                                   c.article_id = text::trim(get("article_id"));
                                   const std::string ts = text::trim(get("timestamp"));
                                   if (!ts.empty()) {
                                       c.timestamp = Timestamp::parse(ts);
                                       if (!c.timestamp) {
                                           return std::string("malformed timestamp");
                                       }
                                   }
                                   return c;
                               });
}

Parsed<CheckIn> read_checkins(const std::filesystem::path& path, const Schema& schema) {
    auto in = open_input(path);
    return parse_checkins(in, schema);
}

Parsed<Report> read_reports(const std::filesystem::path& path, const Schema& schema) {
    auto in = open_input(path);
    return parse_reports(in, schema);
}

Parsed<Comment> read_comments(const std::filesystem::path& path, const Schema& schema) {
    auto in = open_input(path);
    return parse_comments(in, schema);
}

std::vector<CheckIn> dedupe_checkins(const std::vector<CheckIn>& records) {
    std::map<std::pair<std::string, std::string>, std::size_t> best;
    for (std::size_t i = 0; i < records.size(); ++i) {
        auto [it, inserted] = best.try_emplace({records[i].user_id, records[i].venue_key()}, i);
        if (!inserted && earlier(records[i].timestamp, records[it->second].timestamp)) {
            it->second = i;
        }
    }
    std::vector<CheckIn> out;
    out.reserve(best.size());
    for (const auto& [key, index] : best) {
        out.push_back(records[index]);
    }
    return out;
}

std::vector<Report> filter_by_date(const std::vector<Report>& reports, const std::optional<std::string>& from,
                                   const std::optional<std::string>& to) {
    auto check = [](const std::optional<std::string>& bound, const char* name) {
        if (bound && (bound->size() != 10 || !Timestamp::parse(*bound))) {
            throw InvalidInput(std::string("date filter '") + name + "' must be YYYY-MM-DD, got '" + *bound + "'");
        }
    };
    check(from, "from");
    check(to, "to");
    std::vector<Report> out;
    for (const auto& r : reports) {
        const auto date = r.timestamp.date();
        if ((from && date < std::string_view(*from)) || (to && date > std::string_view(*to))) {
            continue;
        }
        out.push_back(r);
    }
    return out;
}

}  // namespace urbanpulse::ingest
