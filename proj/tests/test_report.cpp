#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "stereotac/report.hpp"

using namespace stereotac;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "stereotac_report_tests";
  fs::create_directories(dir);
  return dir;
}

int count_data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  int rows = -2;  // skip title + header
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  return rows;
}

bool tables_equal(const ReportTable& a, const ReportTable& b) {
  if (a.title() != b.title() || a.row_labels() != b.row_labels() ||
      a.column_labels() != b.column_labels() || a.column_units() != b.column_units()) {
    return false;
  }
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < a.columns(); ++c) {
      const ReportCell& x = a.cell(r, c);
      const ReportCell& y = b.cell(r, c);
      if (x.value != y.value || x.spread != y.spread) return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("1x1 table writes a single data row") {
  ReportTable t("smoke", {"only"}, {"metric"}, {"%"});
  t.cell(0, 0) = ReportCell::of(1.25);
  const fs::path p = temp_dir() / "one.csv";
  write_report(t, p, ReportFormat::Csv);
  CHECK(count_data_rows(p) == 1);
  CHECK(tables_equal(read_report(p, ReportFormat::Csv), t));
}

TEST_CASE("opacity-style table: 6 rows x 2 columns") {
  ReportTable t("membrane opacity",
                {"none", "transparent", "semi_reflective", "semi_matte",
                 "opaque_reflective", "opaque_matte"},
                {"total_light", "opacity"}, {"lux", "%"});
  const double lux[6] = {466, 442, 352, 363, 93, 141};
  const double pct[6] = {0, 5.15, 24.46, 22.10, 80.04, 69.74};
  for (int r = 0; r < 6; ++r) {
    t.cell(r, 0) = ReportCell::of(lux[r]);
    t.cell(r, 1) = r == 0 ? ReportCell::gap() : ReportCell::of(pct[r]);
  }
  const fs::path p = temp_dir() / "opacity.csv";
  write_report(t, p, ReportFormat::Csv);
  CHECK(count_data_rows(p) == 6);
  CHECK(tables_equal(read_report(p, ReportFormat::Csv), t));
}

TEST_CASE("distance-sweep table: 5 rows x 4 columns with spreads") {
  ReportTable t("rmse by distance", {"100", "150", "200", "250", "300"},
                {"a", "b", "c", "d"}, {"%", "%", "%", "%"});
  for (std::size_t r = 0; r < 5; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      t.cell(r, c) = ReportCell::of(0.5 * (r + 1), 0.03 * (c + 1));
    }
  }
  const fs::path csv = temp_dir() / "sweep.csv";
  const fs::path json = temp_dir() / "sweep.json";
  write_report(t, csv, ReportFormat::Csv);
  write_report(t, json, ReportFormat::Json);
  CHECK(count_data_rows(csv) == 5);
  CHECK(tables_equal(read_report(csv, ReportFormat::Csv), t));
  CHECK(tables_equal(read_report(json, ReportFormat::Json), t));
}

TEST_CASE("gaps survive both formats") {
  ReportTable t("gappy", {"r1", "r2"}, {"c1", "c2"}, {"mm", "mm"});
  t.cell(0, 0) = ReportCell::of(3.5);
  t.cell(1, 1) = ReportCell::of(-1.0, 0.25);
  for (auto fmt : {ReportFormat::Csv, ReportFormat::Json}) {
    const fs::path p = temp_dir() / (fmt == ReportFormat::Csv ? "g.csv" : "g.json");
    write_report(t, p, fmt);
    const ReportTable back = read_report(p, fmt);
    CHECK(tables_equal(back, t));
    CHECK_FALSE(back.cell(0, 1).value.has_value());
    CHECK_FALSE(back.cell(1, 0).value.has_value());
  }
}

}  // TEST_SUITE
