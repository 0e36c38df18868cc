#include "curveflow/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace curveflow::io {

namespace {

constexpr std::array<const char*, 7> kMetricKeys = {"step", "time", "dt", "length", "max_k", "int_k2", "resampled"};

std::ofstream open_out(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open " + path.string() + " for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return in;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos - start));
        if (pos == std::string::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

template <typename T>
T parse_field(const std::string& text, std::size_t line_no)
{
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("line " + std::to_string(line_no) + ": cannot parse \"" + text + "\"");
    return value;
}

double json_number(const Json& value, std::size_t line_no, const char* key)
{
    if (value.is_null())
        return std::numeric_limits<double>::quiet_NaN();
    if (!value.is_number())
        throw ConfigError("line " + std::to_string(line_no) + ": \"" + key + "\" is not a number");
    return value.get<double>();
}

} // namespace

std::string format_double(double value)
{
    std::array<char, 64> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

std::string snapshot_filename(long index)
{
    std::array<char, 32> buffer{};
    std::snprintf(buffer.data(), buffer.size(), "snapshot_%05ld.csv", index);
    return buffer.data();
}

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot)
{
    out << kSnapshotHeader << '\n';
    const std::string index = std::to_string(snapshot.index);
    const std::string time = format_double(snapshot.time);
    for (std::size_t i = 0; i < snapshot.vertices.size(); ++i) {
        const Vec3& p = snapshot.vertices[i];
        out << index << ',' << time << ',' << i << ',' << format_double(p.x()) << ',' << format_double(p.y()) << ','
            << format_double(p.z()) << '\n';
    }
}

void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snapshot)
{
    auto out = open_out(path);
    write_snapshot_csv(out, snapshot);
}

Snapshot read_snapshot_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || line != kSnapshotHeader)
        throw ConfigError("line 1: expected header \"" + std::string(kSnapshotHeader) + "\"");
    Snapshot snapshot{-1, -1, 0.0, {}};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            throw ConfigError("line " + std::to_string(line_no) + ": CRLF line ending");
        const auto fields = split(line, ',');
        if (fields.size() != 6)
            throw ConfigError("line " + std::to_string(line_no) + ": expected 6 fields");
        const long index = parse_field<long>(fields[0], line_no);
        const double time = parse_field<double>(fields[1], line_no);
        const auto vertex = parse_field<std::size_t>(fields[2], line_no);
        if (snapshot.vertices.empty()) {
            snapshot.index = index;
            snapshot.time = time;
        } else if (index != snapshot.index || time != snapshot.time) {
            throw ConfigError("line " + std::to_string(line_no) + ": snapshot index/time changed mid-file");
        }
        if (vertex != snapshot.vertices.size())
            throw ConfigError("line " + std::to_string(line_no) + ": vertex_index out of sequence");
        snapshot.vertices.emplace_back(parse_field<double>(fields[3], line_no), parse_field<double>(fields[4], line_no),
                                       parse_field<double>(fields[5], line_no));
    }
    if (snapshot.vertices.empty())
        throw ConfigError("snapshot has no vertices");
    return snapshot;
}

Snapshot read_snapshot_csv(const std::filesystem::path& path)
{
    auto in = open_in(path);
    try {
        return read_snapshot_csv(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string metrics_line(const TraceRecord& record)
{
    Json doc;
    doc["step"] = record.step;
    doc["time"] = record.time;
    doc["dt"] = record.dt;
    doc["length"] = record.length;
    doc["max_k"] = record.max_k;
    doc["int_k2"] = record.int_k2;
    doc["resampled"] = record.resampled;
    return doc.dump();
}

void write_metrics_jsonl(std::ostream& out, const std::vector<TraceRecord>& records)
{
    for (const auto& record : records)
        out << metrics_line(record) << '\n';
}

void write_metrics_jsonl(const std::filesystem::path& path, const std::vector<TraceRecord>& records)
{
    auto out = open_out(path);
    write_metrics_jsonl(out, records);
}

std::vector<TraceRecord> read_metrics_jsonl(std::istream& in)
{
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        Json doc;
        try {
            doc = Json::parse(line);
        } catch (const Json::parse_error&) {
            throw ConfigError("line " + std::to_string(line_no) + ": invalid JSON");
        }
        if (!doc.is_object() || doc.size() != kMetricKeys.size())
            throw ConfigError("line " + std::to_string(line_no) + ": expected an object with 7 keys");
        std::size_t k = 0;
        for (const auto& [key, value] : doc.items()) {
            if (key != kMetricKeys[k++])
                throw ConfigError("line " + std::to_string(line_no) + ": unexpected key \"" + key + "\"");
        }
        if (!doc["step"].is_number_integer() || !doc["resampled"].is_boolean())
            throw ConfigError("line " + std::to_string(line_no) + ": step must be an integer, resampled a bool");
        records.push_back(TraceRecord{doc["step"].get<long>(), json_number(doc["time"], line_no, "time"),
                                      json_number(doc["dt"], line_no, "dt"),
                                      json_number(doc["length"], line_no, "length"),
                                      json_number(doc["max_k"], line_no, "max_k"),
                                      json_number(doc["int_k2"], line_no, "int_k2"), doc["resampled"].get<bool>()});
    }
    return records;
}

std::vector<TraceRecord> read_metrics_jsonl(const std::filesystem::path& path)
{
    auto in = open_in(path);
    try {
        return read_metrics_jsonl(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

Json read_json_file(const std::filesystem::path& path)
{
    auto in = open_in(path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& doc)
{
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
}

void validate_manifest(const Json& manifest)
{
    auto require = [&](const char* key, bool ok) {
        if (!manifest.contains(key) || !ok)
            throw ConfigError(std::string("manifest: missing or mistyped \"") + key + "\"");
    };
    if (!manifest.is_object())
        throw ConfigError("manifest: not an object");
    require("scenario", manifest.contains("scenario") && manifest["scenario"].is_string());
    require("surface", manifest.contains("surface") && manifest["surface"].is_object());
    require("generator", manifest.contains("generator") && manifest["generator"].is_object());
    require("config", manifest.contains("config") && manifest["config"].is_object());
    require("classification", manifest.contains("classification") && manifest["classification"].is_string());
    require("final_length", manifest.contains("final_length") &&
                                (manifest["final_length"].is_number() || manifest["final_length"].is_null()));
    require("plateaus", manifest.contains("plateaus") && manifest["plateaus"].is_array());
    require("self_check", manifest.contains("self_check") && manifest["self_check"].is_string());
    classification_from_string(manifest["classification"].get<std::string>());
    const auto check = manifest["self_check"].get<std::string>();
    if (check != "pass" && check != "fail" && check != "none")
        throw ConfigError("manifest: self_check must be pass, fail or none");
    for (const auto& plateau : manifest["plateaus"]) {
        if (!plateau.is_object() || !plateau.contains("start") || !plateau["start"].is_number_integer() ||
            !plateau.contains("end") || !plateau["end"].is_number_integer() || !plateau.contains("mean_length") ||
            !plateau["mean_length"].is_number())
            throw ConfigError("manifest: malformed plateau entry");
    }
}

} // namespace curveflow::io
