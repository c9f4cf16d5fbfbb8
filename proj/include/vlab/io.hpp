#pragma once

#include "vlab/field.hpp"
#include "vlab/flow.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace vlab {

/// VFLD1 field file: 5-byte magic "VFLD1", then little-endian u32 version,
/// u32 N, u32 m, u32 M, f64 L, then m * M^N f64 values row-major, component
/// by component. Round-trips bit-exactly.
void write_field(const std::filesystem::path& path, const VectorField& u);
VectorField read_field(const std::filesystem::path& path);

/// Trace CSV with fixed columns iter,energy,kinetic,potential,mass_error,
/// residual,tau; floats printed with 17 significant digits.
void write_trace_csv(const std::filesystem::path& path,
                     const std::vector<TraceRow>& trace);

/// Scan CSV with columns c,energy,multiplier,residual.
void write_scan_csv(const std::filesystem::path& path,
                    const std::vector<ScanPoint>& points);

/// Pretty-printed JSON, written atomically (temp file + rename).
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Atomic text write used by the CSV and JSON writers.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

} // namespace vlab
