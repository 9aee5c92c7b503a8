#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "surgscan/report.hpp"

using namespace surgscan;
using namespace surgscan::metrics;

namespace {

std::vector<MetricsRow> sample() {
  return {{"A", 0.90, 0.91, 0.92, 0.93, 0.94, 0.95},
          {"B", 0.95, 0.90, 0.99, 0.80, 0.81, 0.95},
          {"C", 0.94999, 0.10, 0.10, 0.10, 0.10, 0.10}};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST(Report, ColumnMaximaIncludeTiesAtDisplayPrecision) {
  const auto maxima = column_maxima(sample());
  EXPECT_EQ(maxima[0], (std::vector<std::size_t>{1, 2}));  // 0.95 and 0.94999 both show 0.9500
  EXPECT_EQ(maxima[1], (std::vector<std::size_t>{0}));
  EXPECT_EQ(maxima[2], (std::vector<std::size_t>{1}));
  EXPECT_EQ(maxima[5], (std::vector<std::size_t>{0, 1}));
}

TEST(Report, RenderMarksMaxima) {
  const std::string text = render_comparison(sample(), "Demo");
  EXPECT_NE(text.find("Demo"), std::string::npos);
  EXPECT_NE(text.find("0.9900*"), std::string::npos);
  EXPECT_NE(text.find("0.9100*"), std::string::npos);
  EXPECT_EQ(text.find("0.1000*"), std::string::npos);
  for (auto col : kMetricColumns) EXPECT_NE(text.find(col), std::string::npos);
  EXPECT_THROW(render_comparison({}, "x"), Error);
  EXPECT_THROW(render_comparison({{"bad", 1.2, 0, 0, 0, 0, 0}}, "x"), Error);
}

TEST(Report, CsvRoundTrip) {
  std::vector<MetricsRow> rows{{"M1", 0.1234, 0.5, 0.25, 0.125, 1.0, 0.0}, {"M 2", 0.9, 0.8, 0.7, 0.6, 0.5, 0.4}};
  const std::string csv = to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "Model,Training Acc.,Testing Acc.,Precision,Recall,F1-Score,ROC-AUC");
  const auto back = parse_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].model_name, "M 2");
  EXPECT_EQ(back[0].values(), rows[0].values());
  std::string tsv = csv;
  std::replace(tsv.begin(), tsv.end(), ',', '\t');
  EXPECT_EQ(parse_csv(tsv)[1].values(), rows[1].values());
  EXPECT_THROW(parse_csv(""), Error);
  EXPECT_THROW(parse_csv("Model,Foo\n"), Error);
  EXPECT_THROW(parse_csv(csv + "X,1,2\n"), Error);
  EXPECT_THROW(parse_csv(csv + "X,a,0,0,0,0,0\n"), Error);
}

TEST(ReferenceTables, YoloV8LeadsEveryColumn) {
  const char* dir = SURGSCAN_TABLES_DIR;
  int tables = 0;
  for (const auto& item : std::filesystem::directory_iterator(dir)) {
    if (item.path().extension() != ".csv") continue;
    ++tables;
    const auto rows = parse_csv(slurp(item.path()));
    ASSERT_EQ(rows.size(), 5u) << item.path();
    std::size_t yolo = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].model_name == "YOLOv8") yolo = i;
    }
    ASSERT_LT(yolo, rows.size());
    const auto maxima = column_maxima(rows);
    for (std::size_t c = 0; c < maxima.size(); ++c) {
      EXPECT_NE(std::find(maxima[c].begin(), maxima[c].end(), yolo), maxima[c].end())
          << item.path().filename() << " " << kMetricColumns[c];
    }
  }
  EXPECT_EQ(tables, 3);
}
