// Tabular result container and its CSV / JSON serializations.
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "stereotac/image.hpp"

namespace stereotac {

/// One table cell: a value with an optional spread (std), or a gap.
struct ReportCell {
  std::optional<double> value;
  std::optional<double> spread;

  static ReportCell gap() { return {}; }
  static ReportCell of(double v) { return {v, std::nullopt}; }
  static ReportCell of(double v, double s) { return {v, s}; }
};

/// Rectangular table. Columns carry the unit tag ("%" or "mm").
class ReportTable {
 public:
  ReportTable(std::string title, std::vector<std::string> row_labels,
              std::vector<std::string> column_labels,
              std::vector<std::string> column_units);

  const std::string& title() const { return title_; }
  std::size_t rows() const { return row_labels_.size(); }
  std::size_t columns() const { return column_labels_.size(); }
  const std::vector<std::string>& row_labels() const { return row_labels_; }
  const std::vector<std::string>& column_labels() const { return column_labels_; }
  const std::vector<std::string>& column_units() const { return column_units_; }

  ReportCell& cell(std::size_t row, std::size_t col);
  const ReportCell& cell(std::size_t row, std::size_t col) const;

 private:
  std::string title_;
  std::vector<std::string> row_labels_;
  std::vector<std::string> column_labels_;
  std::vector<std::string> column_units_;
  std::vector<ReportCell> cells_;
};

enum class ReportFormat { Csv, Json };

void write_report(const ReportTable& table, const std::filesystem::path& path,
                  ReportFormat format);

/// Parse back a report written by write_report (either format); used to check
/// lossless serialization.
ReportTable read_report(const std::filesystem::path& path, ReportFormat format);

}  // namespace stereotac
