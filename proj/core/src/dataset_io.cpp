#include "nlcp/dataset_io.hpp"

#include "nlcp/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string_view>

namespace nlcp {

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

void write_csv(std::ostream& out, const std::vector<PredictionRecord>& records) {
    out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.id << ',' << format_double(r.y_hat) << ',' << format_double(r.u_hat) << ',';
        if (r.label_clean) {
            out << format_double(*r.label_clean);
        }
        out << ',';
        if (r.label_noisy) {
            out << format_double(*r.label_noisy);
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const std::vector<PredictionRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    }
    write_csv(out, records);
    out.flush();
    if (!out) {
        throw Error(ErrorCode::Io, "failed writing " + path.string());
    }
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
    throw Error(ErrorCode::InvalidArgument, "line " + std::to_string(line) + ": " + what);
}

double parse_number(std::string_view cell, std::size_t line, const char* column) {
    double v = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (res.ec != std::errc{} || res.ptr != cell.data() + cell.size()) {
        malformed(line, std::string("bad number in column ") + column);
    }
    return v;
}

std::optional<double> parse_optional(std::string_view cell, std::size_t line, const char* column) {
    if (cell.empty()) {
        return std::nullopt;
    }
    return parse_number(cell, line, column);
}

} // namespace

std::vector<PredictionRecord> read_csv(std::istream& in) {
    std::string text;
    std::size_t line_no = 0;
    if (!std::getline(in, text)) {
        throw Error(ErrorCode::InvalidArgument, "empty CSV: header required");
    }
    ++line_no;
    if (trim(text) != kCsvHeader) {
        malformed(line_no, std::string("expected header '") + kCsvHeader + "'");
    }
    std::vector<PredictionRecord> out;
    while (std::getline(in, text)) {
        ++line_no;
        const std::string_view line = trim(text);
        if (line.empty()) {
            continue;
        }
        std::string_view cells[5];
        std::size_t count = 0;
        std::size_t start = 0;
        for (;;) {
            const auto comma = line.find(',', start);
            if (count == 5) {
                malformed(line_no, "expected 5 columns");
            }
            cells[count++] = trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (count != 5) {
            malformed(line_no, "expected 5 columns");
        }
        PredictionRecord r;
        std::uint64_t id = 0;
        const auto res = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), id);
        if (res.ec != std::errc{} || res.ptr != cells[0].data() + cells[0].size()) {
            malformed(line_no, "bad id");
        }
        r.id = id;
        r.y_hat = parse_number(cells[1], line_no, "y_hat");
        r.u_hat = parse_number(cells[2], line_no, "u_hat");
        r.label_clean = parse_optional(cells[3], line_no, "label_clean");
        r.label_noisy = parse_optional(cells[4], line_no, "label_noisy");
        validate(r);
        out.push_back(r);
    }
    return out;
}

std::vector<PredictionRecord> read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    return read_csv(in);
}

} // namespace nlcp
