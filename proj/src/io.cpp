#include <cstdio>
#include <fstream>
#include <sstream>

#include "fou2/io.hpp"

namespace fou2 {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string path_to_csv(const TimeGrid& grid, std::span<const double> values) {
  std::ostringstream os;
  os << "t,value\n";
  for (std::size_t i = 0; i < grid.size(); ++i)
    os << format_double(grid.points[i]) << "," << format_double(values[i]) << "\n";
  return os.str();
}

void write_path_csv(const std::filesystem::path& path, const GaussianPath& p) {
  atomic_write(path, path_to_csv(p.grid, p.values));
}

void write_path_csv(const std::filesystem::path& path, const ProcessPath& p) {
  atomic_write(path, path_to_csv(p.grid, p.values));
}

std::string qv_to_csv(const QVSeries& est, const IVTarget& target) {
  if (est.eval.points != target.eval.points)
    throw std::invalid_argument("qv_to_csv: evaluation grids must match");
  std::ostringstream os;
  os << "t,qv,target,abs_error\n";
  for (std::size_t i = 0; i < est.values.size(); ++i)
    os << format_double(est.eval.points[i]) << "," << format_double(est.values[i]) << ","
       << format_double(target.values[i]) << ","
       << format_double(std::abs(est.values[i] - target.values[i])) << "\n";
  return os.str();
}

void write_qv_csv(const std::filesystem::path& path, const QVSeries& est,
                  const IVTarget& target) {
  atomic_write(path, qv_to_csv(est, target));
}

std::string samples_to_csv(const SampleTable& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << "\n";
  }
  return os.str();
}

void write_samples_csv(const std::filesystem::path& path, const SampleTable& table) {
  atomic_write(path, samples_to_csv(table));
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j) {
  atomic_write(path, j.dump(2) + "\n");
}

std::pair<TimeGrid, std::vector<double>> read_path_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV " + path.string());
  std::vector<double> times, values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed CSV row in " + path.string() + ": " + line);
    times.push_back(std::stod(line.substr(0, comma)));
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  return {TimeGrid::from_points(std::move(times)), std::move(values)};
}

}  // namespace fou2
