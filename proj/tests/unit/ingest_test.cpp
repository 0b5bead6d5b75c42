#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>

#include "urbanpulse/delimited.hpp"
#include "urbanpulse/error.hpp"
#include "urbanpulse/ingest.hpp"

using namespace urbanpulse;
using namespace urbanpulse::ingest;

namespace {

template <typename F>
auto parse(F f, const std::string& text, const Schema& schema = {}) {
    std::istringstream in(text);
    return f(in, schema);
}

constexpr auto kCheckinHeader = "user_id,venue_id,beer_style,lat,lon,timestamp\n";

std::string fmt_day(int day) {
    return (day < 10 ? "2017-02-0" : "2017-02-") + std::to_string(day);
}

}  // namespace

TEST(Delimited, QuotedFieldsAndEmbeddedNewlines) {
    std::istringstream in("a,b,c\n\"x,1\",\"say \"\"hi\"\"\",\"two\nlines\"\n\n1,2,3\n");
    delimited::Reader reader(in, ',');
    auto r = reader.next();
    ASSERT_TRUE(r);
    EXPECT_EQ(r->fields, (std::vector<std::string>{"a", "b", "c"}));
    r = reader.next();
    ASSERT_TRUE(r);
    EXPECT_EQ(r->fields, (std::vector<std::string>{"x,1", "say \"hi\"", "two\nlines"}));
    r = reader.next();
    ASSERT_TRUE(r);
    EXPECT_EQ(r->line, 5u);
    EXPECT_FALSE(reader.next());
}

TEST(Delimited, UnterminatedQuoteIsAnError) {
    std::istringstream in("\"open,1\n");
    delimited::Reader reader(in, ',');
    auto r = reader.next();
    ASSERT_TRUE(r);
    EXPECT_FALSE(r->error.empty());
}

TEST(Delimited, EscapeRoundTrip) {
    for (std::string s : {"plain", "with,comma", "with \"quote\"", "new\nline", ""}) {
        std::ostringstream out;
        delimited::write_row(out, {s, std::string("x")});
        std::istringstream in(out.str());
        delimited::Reader reader(in, ',');
        auto r = reader.next();
        ASSERT_TRUE(r);
        if (s.empty()) {
            EXPECT_EQ(r->fields, (std::vector<std::string>{"", "x"}));
        } else {
            EXPECT_EQ(r->fields.front(), s);
        }
    }
}

TEST(Timestamp, ParsesAndOrders) {
    auto a = Timestamp::parse("2017-03-01T10:00:00Z");
    auto b = Timestamp::parse("2017-03-01T08:00:00-03:00");
    ASSERT_TRUE(a && b);
    ASSERT_TRUE(a->utc_millis && b->utc_millis);
    EXPECT_TRUE(earlier(*a, *b));
    EXPECT_EQ(*b->utc_millis - *a->utc_millis, 3'600'000);
    EXPECT_EQ(a->date(), "2017-03-01");
    auto local = Timestamp::parse("2017-03-01 10:00");
    ASSERT_TRUE(local);
    EXPECT_FALSE(local->utc_millis);
    EXPECT_TRUE(Timestamp::parse("2017-03-01"));
    EXPECT_FALSE(Timestamp::parse("yesterday"));
    EXPECT_FALSE(Timestamp::parse("2017-13-01"));
    EXPECT_FALSE(Timestamp::parse("2017-02-30"));
    EXPECT_FALSE(Timestamp::parse("2017-03-01T25:00"));
}

TEST(Checkins, ParsesValidRows) {
    const auto p = parse(parse_checkins, std::string(kCheckinHeader) +
                                             "u1,v1,IPA,-25.43,-49.27,2017-03-01T10:00:00Z\n"
                                             "u2,,Stout,-25.44,-49.28,2017-03-02\n");
    ASSERT_EQ(p.records.size(), 2u);
    EXPECT_TRUE(p.rejects.empty());
    EXPECT_EQ(p.records[0].venue_key(), "v1");
    EXPECT_EQ(p.records[1].venue_key(), "-25.44000,-49.28000");
}

TEST(Checkins, RejectsCarryLineAndReason) {
    const auto p = parse(parse_checkins, std::string(kCheckinHeader) +
                                             "u1,v1,,-25.43,-49.27,2017-03-01\n"          // 2
                                             ",v1,IPA,-25.43,-49.27,2017-03-01\n"         // 3
                                             "u1,v1,IPA,,-49.27,2017-03-01\n"             // 4
                                             "u1,v1,IPA,abc,-49.27,2017-03-01\n"          // 5
                                             "u1,v1,IPA,95,-49.27,2017-03-01\n"           // 6
                                             "u1,v1,IPA,-25.43,-49.27,\n"                 // 7
                                             "u1,v1,IPA,-25.43,-49.27,soon\n"             // 8
                                             "u1,v1,IPA,-25.43\n"                         // 9
                                             "u1,v1,IPA,-25.43,-49.27,2017-03-01,extra\n"  // 10
                                             "u\xff,v1,IPA,-25.43,-49.27,2017-03-01\n"     // 11
                                             "u1,v1,IPA,-25.43,-49.27,2017-03-01\n");     // 12
    ASSERT_EQ(p.records.size(), 1u);
    ASSERT_EQ(p.rejects.size(), 10u);
    const std::vector<std::pair<std::size_t, std::string>> expected{
        {2, "no beverage type"},   {3, "missing user"},      {4, "missing coordinate"},
        {5, "malformed coordinate"}, {6, "coordinate out of range"}, {7, "missing timestamp"},
        {8, "malformed timestamp"}, {9, "malformed record"}, {10, "malformed record"},
        {11, "invalid utf-8"},
    };
    for (std::size_t i = 0; i < expected.size(); ++i) {
        EXPECT_EQ(p.rejects[i].line, expected[i].first);
        EXPECT_TRUE(p.rejects[i].reason.starts_with(expected[i].second)) << p.rejects[i].reason;
    }
}

TEST(Checkins, MissingColumnIsFatal) {
    EXPECT_THROW(parse(parse_checkins, "user_id,lat,lon\nu,1,2\n"), ParseError);
}

TEST(Checkins, EmptyInputHasNoRecords) {
    const auto p = parse(parse_checkins, "");
    EXPECT_TRUE(p.records.empty());
    EXPECT_TRUE(p.rejects.empty());
    const auto h = parse(parse_checkins, kCheckinHeader);
    EXPECT_TRUE(h.records.empty());
}

TEST(Checkins, SchemaMapsColumnsAndDelimiter) {
    std::istringstream schema_text("# export\nformat=csv\ndelimiter=;\nuser_id=usuario\nbeer_style=estilo\n");
    const auto schema = Schema::parse(schema_text);
    const auto p = parse(parse_checkins,
                         "usuario;venue_id;estilo;lat;lon;timestamp\nu1;v1;IPA;-25.43;-49.27;2013-05-01\n", schema);
    ASSERT_EQ(p.records.size(), 1u);
    EXPECT_EQ(p.records[0].beer_style, "IPA");
}

TEST(Checkins, JsonLines) {
    Schema schema;
    schema.set_format(Format::JsonLines).set_column("user_id", "user");
    const auto p = parse(parse_checkins,
                         "{\"user\":\"u1\",\"venue_id\":\"v\",\"beer_style\":\"IPA\",\"lat\":-25.4,\"lon\":-49.2,"
                         "\"timestamp\":\"2017-01-01\"}\n"
                         "[1,2]\n"
                         "{broken\n",
                         schema);
    EXPECT_EQ(p.records.size(), 1u);
    EXPECT_EQ(p.rejects.size(), 2u);
}

TEST(Schema, Errors) {
    std::istringstream bad("user_id\n");
    EXPECT_THROW(Schema::parse(bad), ParseError);
    std::istringstream dup("a=b\na=c\n");
    EXPECT_THROW(Schema::parse(dup), ParseError);
    std::istringstream fmt("format=xml\n");
    EXPECT_THROW(Schema::parse(fmt), ParseError);
    Schema s;
    s.set_column("bogus", "x");
    EXPECT_THROW(parse(parse_checkins, kCheckinHeader, s), ParseError);
}

TEST(Reports, TwentyRowsWithTwoMalformed) {
    std::string text = "report_id,subject,subdivision,timestamp,comment_text,lat,lon\n";
    for (int i = 0; i < 20; ++i) {
        if (i == 4) {
            text += "r4,noise,Loud music,2017-01-01\n";
            continue;
        }
        if (i == 11) {
            text += "r11,noise,Loud music,2017-01-01,ok,not-a-number,-49.2\n";
            continue;
        }
        text += "r" + std::to_string(i) + ",parking,Double parking,2017-01-0" + std::to_string(1 + i % 9) +
                ",\"text, with comma\",-25.43,-49.27\n";
    }
    const auto p = parse(parse_reports, text);
    EXPECT_EQ(p.records.size() + p.rejects.size(), 20u);
    EXPECT_EQ(p.rejects.size(), 2u);
    EXPECT_EQ(p.records.size(), 18u);
}

TEST(Reports, EmptySubdivisionRejected) {
    const auto p = parse(parse_reports, "report_id,subdivision,lat,lon,timestamp\nr1,  ,-25.4,-49.2,2017-01-01\n");
    ASSERT_EQ(p.rejects.size(), 1u);
    EXPECT_EQ(p.rejects[0].reason, "empty subdivision");
}

TEST(Reports, DateFilterIsInclusive) {
    const auto p = parse(parse_reports,
                         "report_id,subdivision,lat,lon,timestamp\n"
                         "a,x,0,0,2016-05-31T23:59\n"
                         "b,x,0,0,2016-06-01T00:00\n"
                         "c,x,0,0,2017-03-31T23:59\n"
                         "d,x,0,0,2017-04-01\n");
    const auto kept = filter_by_date(p.records, std::string("2016-06-01"), std::string("2017-03-31"));
    ASSERT_EQ(kept.size(), 2u);
    EXPECT_EQ(kept[0].report_id, "b");
    EXPECT_EQ(kept[1].report_id, "c");
    EXPECT_EQ(filter_by_date(p.records, std::nullopt, std::nullopt).size(), 4u);
    EXPECT_THROW(filter_by_date(p.records, std::string("June"), std::nullopt), InvalidInput);
}

TEST(Comments, WhitespaceOnlyTextRejected) {
    const auto p = parse(parse_comments, "comment_id,text\nc1,\"   \"\nc2,Bom demais\nc3,\"\"\n");
    ASSERT_EQ(p.records.size(), 1u);
    ASSERT_EQ(p.rejects.size(), 2u);
    EXPECT_EQ(p.rejects[0].reason, "empty text");
}

TEST(Dedupe, KeepsEarliestPerUserVenue) {
    const auto p = parse(parse_checkins, std::string(kCheckinHeader) +
                                             "u1,v1,IPA,-25.43,-49.27,2017-03-05\n"
                                             "u1,v1,Stout,-25.43,-49.27,2017-03-01\n"
                                             "u1,v2,IPA,-25.43,-49.27,2017-03-09\n"
                                             "u2,v1,IPA,-25.43,-49.27,2017-03-09\n");
    const auto d = dedupe_checkins(p.records);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_EQ(d[0].user_id, "u1");
    EXPECT_EQ(d[0].beer_style, "Stout");
    EXPECT_EQ(dedupe_checkins({}).size(), 0u);
}

TEST(Dedupe, MatchesHashSetOracleAndIsIdempotent) {
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> user(0, 30), venue(0, 20), day(1, 28);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<CheckIn> records;
        std::unordered_set<std::string> keys;
        for (int i = 0; i < 300; ++i) {
            CheckIn c;
            c.user_id = "u" + std::to_string(user(rng));
            c.venue_id = venue(rng) == 0 ? "" : "v" + std::to_string(venue(rng));
            c.beer_style = "IPA";
            c.location = geo::GeoPoint(-25.43 + venue(rng) * 1e-3, -49.27);
            c.timestamp = *Timestamp::parse(fmt_day(day(rng)));
            keys.insert(c.user_id + "\x1f" + c.venue_key());
            records.push_back(c);
        }
        const auto once = dedupe_checkins(records);
        EXPECT_EQ(once.size(), keys.size());
        const auto twice = dedupe_checkins(once);
        ASSERT_EQ(twice.size(), once.size());
        for (std::size_t i = 0; i < once.size(); ++i) {
            EXPECT_EQ(twice[i].user_id, once[i].user_id);
            EXPECT_EQ(twice[i].venue_key(), once[i].venue_key());
            EXPECT_EQ(twice[i].timestamp.text, once[i].timestamp.text);
        }
    }
}
