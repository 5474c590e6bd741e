#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "fou2/gaussian.hpp"
#include "fou2/mc.hpp"
#include "fou2/qv.hpp"

namespace fou2 {

/// 17-significant-digit decimal, '.' separator; round-trips doubles exactly.
std::string format_double(double v);

/// Writes to a temporary name in the same directory, then renames; no partial
/// files survive a failure.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::string path_to_csv(const TimeGrid& grid, std::span<const double> values);
void write_path_csv(const std::filesystem::path& path, const GaussianPath& p);
void write_path_csv(const std::filesystem::path& path, const ProcessPath& p);

std::string qv_to_csv(const QVSeries& est, const IVTarget& target);
void write_qv_csv(const std::filesystem::path& path, const QVSeries& est,
                  const IVTarget& target);

std::string samples_to_csv(const SampleTable& table);
void write_samples_csv(const std::filesystem::path& path, const SampleTable& table);

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);

/// Reads a `t,value` CSV back into (grid, values).
std::pair<TimeGrid, std::vector<double>> read_path_csv(const std::filesystem::path& path);

}  // namespace fou2
