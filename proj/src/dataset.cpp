#include "wingbeat/dataset.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "wingbeat/errors.hpp"
#include "wingbeat/wav.hpp"

namespace fs = std::filesystem;

namespace wingbeat {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

}  // namespace

Timestamp Timestamp::plus_seconds(double s) const {
    using namespace std::chrono;
    double total = seconds_of_day + s;
    auto days = static_cast<long>(std::floor(total / 86400.0));
    total -= static_cast<double>(days) * 86400.0;

    const year_month_day ymd{year_month_day{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                                            std::chrono::day{static_cast<unsigned>(day)}}};
    const sys_days moved = sys_days{ymd} + std::chrono::days{days};
    const year_month_day out{moved};

    Timestamp t;
    t.year = static_cast<int>(out.year());
    t.month = static_cast<int>(static_cast<unsigned>(out.month()));
    t.day = static_cast<int>(static_cast<unsigned>(out.day()));
    t.seconds_of_day = total;
    return t;
}

std::string Timestamp::iso() const {
    const int total_ms = static_cast<int>(std::llround(seconds_of_day * 1000.0));
    const int h = total_ms / 3600000;
    const int m = (total_ms / 60000) % 60;
    const int s = (total_ms / 1000) % 60;
    const int ms = total_ms % 1000;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03d",
                  year, month, day, h, m, s, ms);
    return buf;
}

bool Timestamp::looks_like(const std::string& text) {
    return text.size() >= 13 && (text[10] == 'T' || (text.size() >= 9 && text[8] == 'T'));
}

Timestamp Timestamp::parse(const std::string& text) {
    // Accepts 2013-07-15T06:23:41(.123) and the filename form 20130715T062341.
    Timestamp t;
    int h = 0, m = 0;
    double sec = 0.0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%lf",
                    &t.year, &t.month, &t.day, &h, &m, &sec) == 6 ||
        std::sscanf(text.c_str(), "%4d%2d%2dT%2d%2d%lf",
                    &t.year, &t.month, &t.day, &h, &m, &sec) == 6) {
        t.seconds_of_day = h * 3600.0 + m * 60.0 + sec;
        if (t.month < 1 || t.month > 12 || t.day < 1 || t.day > 31 ||
            t.seconds_of_day < 0.0 || t.seconds_of_day >= 86400.0) {
            throw InvalidInput("bad timestamp: " + text);
        }
        return t;
    }
    throw InvalidInput("cannot parse timestamp: " + text);
}

std::vector<ManifestRow> read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    std::vector<ManifestRow> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (first) {
            first = false;
            if (!fields.empty() && fields[0] == "path") continue;  // header
        }
        if (fields.size() != 4) {
            throw IoError("manifest row needs 4 fields, got " +
                          std::to_string(fields.size()) + ": " + line);
        }
        rows.push_back({fields[0], fields[1], fields[2], fields[3]});
    }
    return rows;
}

void write_manifest(const std::string& path, const std::vector<ManifestRow>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest " + path);
    out << "path,label,timestamp,sensor\n";
    for (const auto& r : rows) {
        out << r.path << ',' << r.label << ',' << r.timestamp << ',' << r.sensor << '\n';
    }
}

Spectrum snippet_spectrum(const AudioClip& clip, double band_lo_hz, double band_hi_hz) {
    const auto full = compute_spectrum(clip, static_cast<std::size_t>(clip.sample_rate_hz));
    return truncate_band(full, band_lo_hz, band_hi_hz);
}

Exemplar load_exemplar_row(const ManifestRow& row, const std::string& base_dir,
                           double band_lo_hz, double band_hi_hz, int expected_rate_hz,
                           int* rate_out) {
    fs::path p = row.path;
    if (p.is_relative() && !base_dir.empty()) p = fs::path(base_dir) / p;
    Exemplar e;
    e.path = p.string();
    const AudioClip clip = read_wav(e.path);
    if (expected_rate_hz != 0 && clip.sample_rate_hz != expected_rate_hz) {
        throw BinMismatch("dataset is not rate-homogeneous: " + e.path + " has " +
                          std::to_string(clip.sample_rate_hz) + " Hz, expected " +
                          std::to_string(expected_rate_hz));
    }
    if (rate_out) *rate_out = clip.sample_rate_hz;
    e.spectrum = snippet_spectrum(clip, band_lo_hz, band_hi_hz);
    if (row.label != "?") e.label = ClassLabel::parse(row.label);
    if (row.timestamp != "?") e.time = Timestamp::parse(row.timestamp).time_of_day();
    if (row.sensor != "?") e.sensor = row.sensor;
    return e;
}

std::vector<Exemplar> load_exemplars(const std::string& manifest_path,
                                     double band_lo_hz, double band_hi_hz,
                                     int* sample_rate_out) {
    const auto rows = read_manifest(manifest_path);
    const std::string base = fs::path(manifest_path).parent_path().string();

    std::vector<Exemplar> out;
    int rate = 0;
    for (const auto& row : rows) {
        int row_rate = 0;
        out.push_back(load_exemplar_row(row, base, band_lo_hz, band_hi_hz, rate, &row_rate));
        if (rate == 0) rate = row_rate;
    }
    if (sample_rate_out) *sample_rate_out = rate;
    return out;
}

std::vector<ClassLabel> dataset_classes(const std::vector<Exemplar>& rows) {
    std::set<ClassLabel> seen;
    for (const auto& e : rows) {
        if (e.label) seen.insert(*e.label);
    }
    return {seen.begin(), seen.end()};
}

}  // namespace wingbeat
