#include "surgscan/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace surgscan::metrics {

namespace {

long long display_units(double v) { return std::llround(v * 10000.0); }

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

void validate_rows(const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw Error(Errc::InvalidArgument, "comparison table needs at least one row");
  for (const auto& r : rows) {
    for (double v : r.values()) {
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(Errc::InvalidArgument, "metric for '" + r.model_name + "' outside [0,1]");
      }
    }
  }
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::vector<std::string> split_fields(const std::string& line) {
  const char sep = line.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) {
    auto b = field.find_first_not_of(" \r");
    auto e = field.find_last_not_of(" \r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

std::array<std::vector<std::size_t>, 6> column_maxima(const std::vector<MetricsRow>& rows) {
  std::array<std::vector<std::size_t>, 6> out;
  for (std::size_t c = 0; c < 6; ++c) {
    long long best = -1;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const long long v = display_units(rows[r].values()[c]);
      if (v > best) {
        best = v;
        out[c].clear();
      }
      if (v == best) out[c].push_back(r);
    }
  }
  return out;
}

std::string render_comparison(const std::vector<MetricsRow>& rows, std::string_view title) {
  validate_rows(rows);
  const auto maxima = column_maxima(rows);

  std::size_t name_width = 5;
  for (const auto& r : rows) name_width = std::max(name_width, r.model_name.size());
  name_width += 2;
  std::array<std::size_t, 6> col_width{};
  for (std::size_t c = 0; c < 6; ++c) col_width[c] = std::max<std::size_t>(kMetricColumns[c].size(), 7) + 2;

  std::string out;
  out += title;
  out += '\n';
  out += "(precision, recall and F1-score are macro-averaged; * marks the column maximum)\n";
  std::string header = pad("Model", name_width);
  std::string rule(name_width - 2, '-');
  rule += "  ";
  for (std::size_t c = 0; c < 6; ++c) {
    header += pad(std::string(kMetricColumns[c]), col_width[c]);
    rule += std::string(col_width[c] - 2, '-') + "  ";
  }
  auto rstrip = [](std::string s) {
    s.erase(s.find_last_not_of(' ') + 1);
    return s;
  };
  out += rstrip(header) + '\n';
  out += rstrip(rule) + '\n';
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string line = pad(rows[r].model_name, name_width);
    const auto values = rows[r].values();
    for (std::size_t c = 0; c < 6; ++c) {
      const bool is_max = std::find(maxima[c].begin(), maxima[c].end(), r) != maxima[c].end();
      line += pad(fixed4(values[c]) + (is_max ? "*" : ""), col_width[c]);
    }
    out += rstrip(line) + '\n';
  }
  return out;
}

std::string to_csv(const std::vector<MetricsRow>& rows) {
  std::string out = "Model";
  for (auto col : kMetricColumns) {
    out += ',';
    out += col;
  }
  out += '\n';
  for (const auto& r : rows) {
    out += r.model_name;
    for (double v : r.values()) out += "," + fixed4(v);
    out += '\n';
  }
  return out;
}

std::vector<MetricsRow> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<MetricsRow> rows;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() != 7 || fields[0] != "Model") {
        throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": expected header row");
      }
      for (std::size_t c = 0; c < 6; ++c) {
        if (fields[c + 1] != kMetricColumns[c]) {
          throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": unexpected column '" +
                                               fields[c + 1] + "'");
        }
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 7) {
      throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": expected 7 fields");
    }
    MetricsRow row;
    row.model_name = fields[0];
    double* targets[] = {&row.training_acc, &row.testing_acc, &row.precision,
                         &row.recall,       &row.f1,          &row.roc_auc};
    for (std::size_t c = 0; c < 6; ++c) {
      char* end = nullptr;
      *targets[c] = std::strtod(fields[c + 1].c_str(), &end);
      if (fields[c + 1].empty() || end != fields[c + 1].c_str() + fields[c + 1].size()) {
        throw Error(Errc::MalformedLine, "line " + std::to_string(line_no) + ": bad number '" +
                                             fields[c + 1] + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(Errc::MalformedLine, "empty metrics table");
  return rows;
}

}  // namespace surgscan::metrics
