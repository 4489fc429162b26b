#include "qem/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <sstream>
#include <string>

namespace qem {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

double parse_bound(std::string_view field, std::size_t line_no) {
    std::string low = lowercase(field);
    if (low == "inf" || low == "+inf")
        return std::numeric_limits<double>::infinity();
    if (low == "-inf")
        return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw DataError("line " + std::to_string(line_no) + ": malformed numeric field '" +
                        std::string(field) + "'");
    return value;
}

std::uint64_t parse_count(std::string_view field, std::size_t line_no) {
    std::uint64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw DataError("line " + std::to_string(line_no) + ": malformed count field '" +
                        std::string(field) + "'");
    return value;
}

bool is_header(std::string_view line) {
    auto fields = split_fields(line);
    return !fields.empty() && lowercase(fields[0]) == "lower";
}

std::string format_bound(double v) {
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

template <class RecordFn>
void for_each_record(std::istream& in, RecordFn&& fn) {
    std::string line;
    std::size_t line_no = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::string_view view = trim(line);
        if (view.empty())
            continue;
        if (first_content_line) {
            first_content_line = false;
            if (is_header(view))
                continue;
        }
        fn(view, line_no);
    }
}

} // namespace

Dataset parse_interval_csv(std::istream& in) {
    std::vector<IntervalObservation> obs;
    for_each_record(in, [&](std::string_view record, std::size_t line_no) {
        auto fields = split_fields(record);
        if (fields.size() != 2)
            throw DataError("line " + std::to_string(line_no) +
                            ": expected 2 fields `lower,upper`, got " +
                            std::to_string(fields.size()));
        double lo = parse_bound(fields[0], line_no);
        double hi = parse_bound(fields[1], line_no);
        try {
            obs.emplace_back(lo, hi);
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line_no) + ": " + e.what(), obs.size());
        }
    });
    return Dataset(std::move(obs));
}

Dataset parse_interval_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_interval_csv(in);
}

std::vector<GroupedRow> parse_grouped_csv(std::istream& in) {
    std::vector<GroupedRow> rows;
    for_each_record(in, [&](std::string_view record, std::size_t line_no) {
        auto fields = split_fields(record);
        if (fields.size() != 3)
            throw DataError("line " + std::to_string(line_no) +
                            ": expected 3 fields `lower,upper,count`, got " +
                            std::to_string(fields.size()));
        GroupedRow row{parse_bound(fields[0], line_no), parse_bound(fields[1], line_no),
                       parse_count(fields[2], line_no)};
        if (!(row.lower < row.upper))
            throw DataError("line " + std::to_string(line_no) +
                            ": grouped row requires lower < upper");
        rows.push_back(row);
    });
    return rows;
}

std::vector<GroupedRow> parse_grouped_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_grouped_csv(in);
}

std::string serialize_interval_csv(const Dataset& dataset) {
    std::string out = "lower,upper\n";
    for (const auto& o : dataset.observations()) {
        out += format_bound(o.lower);
        out += ',';
        out += format_bound(o.upper);
        out += '\n';
    }
    return out;
}

} // namespace qem
