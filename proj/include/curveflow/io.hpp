#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "curveflow/flow.hpp"

namespace curveflow::io {

// Snapshot CSV: header `snapshot_index,time,vertex_index,x,y,z`, one row per
// vertex, LF line endings. z is written as 0 for the plane and flat torus.
inline constexpr const char* kSnapshotHeader = "snapshot_index,time,vertex_index,x,y,z";

void write_snapshot_csv(std::ostream& out, const Snapshot& snapshot);
void write_snapshot_csv(const std::filesystem::path& path, const Snapshot& snapshot);
/// Throws ConfigError naming the line on any schema violation.
Snapshot read_snapshot_csv(std::istream& in);
Snapshot read_snapshot_csv(const std::filesystem::path& path);

/// `snapshot_00042.csv`
std::string snapshot_filename(long index);

// Metrics stream: one JSON object per line with keys, in order,
// step, time, dt, length, max_k, int_k2, resampled.
std::string metrics_line(const TraceRecord& record);
void write_metrics_jsonl(std::ostream& out, const std::vector<TraceRecord>& records);
void write_metrics_jsonl(const std::filesystem::path& path, const std::vector<TraceRecord>& records);
std::vector<TraceRecord> read_metrics_jsonl(std::istream& in);
std::vector<TraceRecord> read_metrics_jsonl(const std::filesystem::path& path);

/// Shortest decimal string that round-trips to the same double.
std::string format_double(double value);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& doc);

/// Checks the manifest keys and value types; throws ConfigError.
void validate_manifest(const Json& manifest);

} // namespace curveflow::io
