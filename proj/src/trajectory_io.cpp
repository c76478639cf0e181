#include "liecoord/trajectory_io.hpp"

#include <cstdio>
#include <sstream>

namespace liecoord {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw UsageError("csv: missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in, const std::string& what) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw UsageError(what + ": empty file");
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) table.header.push_back(cell);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(table.header.size());
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const std::size_t end = std::min(line.find(',', pos), line.size());
      const std::string cell = line.substr(pos, end - pos);
      char* stop = nullptr;
      const double v = std::strtod(cell.c_str(), &stop);
      if (cell.empty() || stop != cell.c_str() + cell.size()) {
        throw UsageError(what + ": line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
      row.push_back(v);
      pos = end + 1;
    }
    if (row.size() != table.header.size()) {
      throw UsageError(what + ": line " + std::to_string(line_no) + ": expected " +
                       std::to_string(table.header.size()) + " columns");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<std::string> trajectory_header(std::string_view group, int aux_size) {
  return dispatch_group(group, [&]<LieGroup G>() {
    std::vector<std::string> h{"t", "agent"};
    for (auto name : G::payload_names()) h.emplace_back(name);
    for (auto name : G::tangent_names()) h.push_back("xi_" + std::string(name));
    for (int i = 0; i < aux_size; ++i) h.push_back("aux_" + std::to_string(i));
    return h;
  });
}

nlohmann::json event_to_json(const Event& e) {
  return {{"t", e.t}, {"kind", e.kind}, {"agent", e.agent}, {"detail", e.detail}};
}

nlohmann::json read_manifest(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.json");
  if (!in) throw UsageError("missing " + (dir / "manifest.json").string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("manifest.json: " + std::string(e.what()));
  }
}

}  // namespace liecoord
