#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace urbanpulse::delimited {

struct Record {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
    std::string raw;
    std::string error;  // nonempty if the quoting was malformed
};

/// Streaming reader for delimiter-separated text with RFC 4180 quoting.
///
/// Quoted fields may contain the delimiter, doubled quotes and line breaks.
/// Lines that are completely empty are skipped and never produce a record.
class Reader {
public:
    Reader(std::istream& in, char delimiter = ',');

    std::optional<Record> next();

private:
    std::istream& in_;
    char delimiter_;
    std::size_t line_ = 0;
};

/// Quotes a field when it contains the delimiter, a quote or a line break.
std::string escape(std::string_view field, char delimiter = ',');

void write_row(std::ostream& out, std::span<const std::string> fields, char delimiter = ',');
void write_row(std::ostream& out, std::initializer_list<std::string> fields, char delimiter = ',');

}  // namespace urbanpulse::delimited
