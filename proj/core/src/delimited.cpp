#include "urbanpulse/delimited.hpp"

namespace urbanpulse::delimited {

Reader::Reader(std::istream& in, char delimiter) : in_(in), delimiter_(delimiter) {}

std::optional<Record> Reader::next() {
    std::string line;
    // Skip blank lines between records.
    while (true) {
        if (!std::getline(in_, line)) {
            return std::nullopt;
        }
        ++line_;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (!line.empty()) {
            break;
        }
    }

    Record rec;
    rec.line = line_;
    rec.raw = line;

    std::string field;
    bool in_quotes = false;
    bool was_quoted = false;
    std::size_t i = 0;
    while (true) {
        if (i == line.size()) {
            if (!in_quotes) {
                break;
            }
            std::string more;
            if (!std::getline(in_, more)) {
                rec.error = "unterminated quoted field";
                break;
            }
            ++line_;
            if (!more.empty() && more.back() == '\r') {
                more.pop_back();
            }
            field.push_back('\n');
            rec.raw += '\n';
            rec.raw += more;
            line = std::move(more);
            i = 0;
            continue;
        }
        const char c = line[i++];
        if (in_quotes) {
            if (c == '"') {
                if (i < line.size() && line[i] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == delimiter_) {
            rec.fields.push_back(std::move(field));
            field.clear();
            was_quoted = false;
        } else if (c == '"' && field.empty() && !was_quoted) {
            in_quotes = true;
            was_quoted = true;
        } else if (c == '"' || was_quoted) {
            if (rec.error.empty()) {
                rec.error = "stray quote or text after closing quote";
            }
            field.push_back(c);
        } else {
            field.push_back(c);
        }
    }
    rec.fields.push_back(std::move(field));
    return rec;
}

std::string escape(std::string_view field, char delimiter) {
    if (field.find_first_of(std::string{delimiter, '"', '\n', '\r'}) == std::string_view::npos) {
        return std::string(field);
    }
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') {
            out.push_back('"');
        }
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_row(std::ostream& out, std::span<const std::string> fields, char delimiter) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            out << delimiter;
        }
        out << escape(fields[i], delimiter);
    }
    out << '\n';
}

void write_row(std::ostream& out, std::initializer_list<std::string> fields, char delimiter) {
    write_row(out, std::span<const std::string>(fields.begin(), fields.size()), delimiter);
}

}  // namespace urbanpulse::delimited
