#include "fsign/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fsign/errors.hpp"

namespace fsign::io {

namespace {

std::vector<double> parse_row(const std::string& line, const std::string& path,
                              std::size_t lineno) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    std::string cell = line.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) +
                            ": cannot parse '" + cell + "' as a number");
    }
    while (used < cell.size() &&
           (cell[used] == ' ' || cell[used] == '\t' || cell[used] == '\r')) {
      ++used;
    }
    if (used != cell.size()) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) +
                            ": trailing junk in '" + cell + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string sidecar_path(const std::string& csv_path) {
  std::size_t dot = csv_path.rfind('.');
  std::size_t slash = csv_path.find_last_of("/\\");
  std::string stem = (dot == std::string::npos ||
                      (slash != std::string::npos && dot < slash))
                         ? csv_path
                         : csv_path.substr(0, dot);
  return stem + ".grid.json";
}

std::vector<std::vector<double>> read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "' for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(parse_row(line, path, lineno));
    if (rows.back().size() != rows.front().size()) {
      throw InvalidArgument(path + ":" + std::to_string(lineno) +
                            ": ragged row, expected " +
                            std::to_string(rows.front().size()) + " columns, got " +
                            std::to_string(rows.back().size()));
    }
  }
  if (rows.empty()) throw InvalidArgument(path + ": no data rows");
  return rows;
}

std::vector<Curve> read_sample_csv(const std::string& path) {
  auto rows = read_matrix_csv(path);
  const std::size_t m = rows.front().size();
  if (m < 2) {
    throw InvalidArgument(path + ": need at least 2 grid points, got " +
                          std::to_string(m));
  }

  // Sidecar is optional on read but must agree when present.
  const std::string sp = sidecar_path(path);
  std::ifstream side(sp);
  if (side) {
    nlohmann::json j;
    try {
      side >> j;
    } catch (const std::exception& e) {
      throw InvalidArgument(sp + ": invalid JSON: " + e.what());
    }
    if (!j.contains("m") || !j["m"].is_number_integer()) {
      throw InvalidArgument(sp + ": missing integer field 'm'");
    }
    if (j["m"].get<std::size_t>() != m) {
      throw InvalidArgument(sp + ": sidecar m=" + j["m"].dump() +
                            " disagrees with CSV column count " + std::to_string(m));
    }
    if (j.value("rule", std::string("equidistant")) != "equidistant") {
      throw InvalidArgument(sp + ": unsupported rule '" +
                            j.value("rule", std::string()) + "'");
    }
  }

  GridPtr grid = make_equidistant_grid(m);
  std::vector<Curve> sample;
  sample.reserve(rows.size());
  for (auto& r : rows) sample.emplace_back(grid, std::move(r));
  return sample;
}

void write_matrix_csv(const std::string& path, const std::vector<double>& data,
                      std::size_t rows, std::size_t cols) {
  if (data.size() != rows * cols) {
    throw InvalidArgument("matrix size mismatch writing '" + path + "'");
  }
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      if (j) out << ',';
      out << format_full(data[i * cols + j]);
    }
    out << '\n';
  }
  if (!out) throw InvalidArgument("write failed for '" + path + "'");
}

void write_sample_csv(const std::string& path, const std::vector<Curve>& sample) {
  if (sample.empty()) throw InvalidArgument("refusing to write empty sample");
  const std::size_t m = sample.front().grid->size();
  std::vector<double> flat;
  flat.reserve(sample.size() * m);
  for (const auto& c : sample) {
    require_same_grid(sample.front().grid, c.grid);
    flat.insert(flat.end(), c.values.begin(), c.values.end());
  }
  write_matrix_csv(path, flat, sample.size(), m);

  nlohmann::json j;
  j["m"] = m;
  j["rule"] = "equidistant";
  std::ofstream side(sidecar_path(path));
  if (!side) throw InvalidArgument("cannot open '" + sidecar_path(path) + "' for writing");
  side << j.dump(2) << '\n';
}

Curve read_curve_csv(const std::string& path) {
  auto sample = read_sample_csv(path);
  if (sample.size() != 1) {
    throw InvalidArgument(path + ": expected exactly one row, got " +
                          std::to_string(sample.size()));
  }
  return std::move(sample.front());
}

void write_curve_csv(const std::string& path, const Curve& curve) {
  write_sample_csv(path, {curve});
}

}  // namespace fsign::io
