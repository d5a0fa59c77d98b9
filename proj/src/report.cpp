#include "stereotac/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "stereotac/image_io.hpp"

namespace stereotac {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string csv_cell(const ReportCell& c) {
  if (!c.value) return "";
  std::string s = fmt_double(*c.value);
  if (c.spread) s += " : " + fmt_double(*c.spread);
  return s;
}

ReportCell parse_csv_cell(const std::string& s) {
  if (s.empty()) return ReportCell::gap();
  const std::size_t sep = s.find(" : ");
  if (sep == std::string::npos) return ReportCell::of(std::stod(s));
  return ReportCell::of(std::stod(s.substr(0, sep)), std::stod(s.substr(sep + 3)));
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ReportTable::ReportTable(std::string title, std::vector<std::string> row_labels,
                         std::vector<std::string> column_labels,
                         std::vector<std::string> column_units)
    : title_(std::move(title)),
      row_labels_(std::move(row_labels)),
      column_labels_(std::move(column_labels)),
      column_units_(std::move(column_units)) {
  if (column_units_.size() != column_labels_.size()) {
    throw Error("column unit count does not match column count");
  }
  cells_.assign(row_labels_.size() * column_labels_.size(), ReportCell::gap());
}

ReportCell& ReportTable::cell(std::size_t row, std::size_t col) {
  return cells_.at(row * columns() + col);
}

const ReportCell& ReportTable::cell(std::size_t row, std::size_t col) const {
  return cells_.at(row * columns() + col);
}

void write_report(const ReportTable& table, const std::filesystem::path& path,
                  ReportFormat format) {
  if (format == ReportFormat::Csv) {
    std::string out;
    out += "# " + table.title() + "\n";
    out += "label";
    for (std::size_t c = 0; c < table.columns(); ++c) {
      out += "," + table.column_labels()[c] + " [" + table.column_units()[c] + "]";
    }
    out += "\n";
    for (std::size_t r = 0; r < table.rows(); ++r) {
      out += table.row_labels()[r];
      for (std::size_t c = 0; c < table.columns(); ++c) {
        out += "," + csv_cell(table.cell(r, c));
      }
      out += "\n";
    }
    io::atomic_write_bytes(path, out);
    return;
  }

  ordered_json j;
  j["title"] = table.title();
  j["columns"] = ordered_json::array();
  for (std::size_t c = 0; c < table.columns(); ++c) {
    j["columns"].push_back(
        {{"label", table.column_labels()[c]}, {"unit", table.column_units()[c]}});
  }
  j["rows"] = ordered_json::array();
  for (std::size_t r = 0; r < table.rows(); ++r) {
    ordered_json row;
    row["label"] = table.row_labels()[r];
    row["cells"] = ordered_json::array();
    for (std::size_t c = 0; c < table.columns(); ++c) {
      const ReportCell& cell = table.cell(r, c);
      if (!cell.value) {
        row["cells"].push_back(nullptr);
      } else if (!cell.spread) {
        row["cells"].push_back({{"value", *cell.value}});
      } else {
        row["cells"].push_back({{"value", *cell.value}, {"spread", *cell.spread}});
      }
    }
    j["rows"].push_back(row);
  }
  io::atomic_write_bytes(path, j.dump(2) + "\n");
}

ReportTable read_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open file: " + path.string());

  if (format == ReportFormat::Csv) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
      throw Error("malformed report CSV (missing title line): " + path.string());
    }
    const std::string title = line.substr(2);
    if (!std::getline(in, line)) throw Error("malformed report CSV: " + path.string());
    std::vector<std::string> header = split_csv_line(line);
    if (header.empty() || header[0] != "label") {
      throw Error("malformed report CSV header: " + path.string());
    }
    std::vector<std::string> labels, units;
    for (std::size_t c = 1; c < header.size(); ++c) {
      const std::string& h = header[c];
      const std::size_t open = h.rfind(" [");
      if (open == std::string::npos || h.back() != ']') {
        throw Error("malformed report CSV column: " + h);
      }
      labels.push_back(h.substr(0, open));
      units.push_back(h.substr(open + 2, h.size() - open - 3));
    }
    std::vector<std::string> row_labels;
    std::vector<std::vector<ReportCell>> row_cells;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> fields = split_csv_line(line);
      if (fields.size() != labels.size() + 1) {
        throw Error("malformed report CSV row: " + line);
      }
      row_labels.push_back(fields[0]);
      std::vector<ReportCell> cells;
      for (std::size_t c = 1; c < fields.size(); ++c) cells.push_back(parse_csv_cell(fields[c]));
      row_cells.push_back(std::move(cells));
    }
    ReportTable table(title, row_labels, labels, units);
    for (std::size_t r = 0; r < table.rows(); ++r) {
      for (std::size_t c = 0; c < table.columns(); ++c) table.cell(r, c) = row_cells[r][c];
    }
    return table;
  }

  ordered_json j = ordered_json::parse(in, nullptr, true);
  std::vector<std::string> labels, units, row_labels;
  for (const auto& col : j.at("columns")) {
    labels.push_back(col.at("label").get<std::string>());
    units.push_back(col.at("unit").get<std::string>());
  }
  for (const auto& row : j.at("rows")) {
    row_labels.push_back(row.at("label").get<std::string>());
  }
  ReportTable table(j.at("title").get<std::string>(), row_labels, labels, units);
  std::size_t r = 0;
  for (const auto& row : j.at("rows")) {
    std::size_t c = 0;
    for (const auto& cell : row.at("cells")) {
      if (cell.is_null()) {
        table.cell(r, c) = ReportCell::gap();
      } else if (cell.contains("spread")) {
        table.cell(r, c) = ReportCell::of(cell.at("value").get<double>(),
                                          cell.at("spread").get<double>());
      } else {
        table.cell(r, c) = ReportCell::of(cell.at("value").get<double>());
      }
      ++c;
    }
    ++r;
  }
  return table;
}

}  // namespace stereotac
