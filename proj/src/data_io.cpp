#include "trendshift/data_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

namespace trendshift {

namespace {

struct Row {
  int year;
  double value;
  std::size_t line;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

bool looks_monthly(std::string_view token) {
  // 1850-01, 1850/01, 185001, 1850.042
  if (token.find('-', 1) != std::string_view::npos || token.find('/') != std::string_view::npos) return true;
  if (token.find('.') != std::string_view::npos) return true;
  return token.size() == 6 && std::all_of(token.begin(), token.end(), [](char c) { return std::isdigit(c); });
}

int to_year(std::string_view s, std::size_t line) {
  if (looks_monthly(s)) throw ParseError("monthly time stamp '" + std::string(s) + "'; annual data required", line);
  int year = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad year '" + std::string(s) + "'", line);
  if (year < 1000 || year > 9999) throw ParseError("implausible year " + std::to_string(year), line);
  return year;
}

double to_anomaly(std::string_view s, std::size_t line) {
  const auto v = to_double(s);
  if (!v) throw ParseError("non-numeric anomaly '" + std::string(s) + "'", line);
  return *v;
}

struct Lines {
  explicit Lines(std::string_view text) : text_(text) {}
  // Next line without its terminator (handles LF and CRLF).
  bool next(std::string_view& out) {
    if (pos_ >= text_.size()) return false;
    auto end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    out = text_.substr(pos_, end - pos_);
    if (!out.empty() && out.back() == '\r') out.remove_suffix(1);
    pos_ = end + 1;
    ++number_;
    return true;
  }
  std::size_t number() const { return number_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t number_ = 0;
};

AnnualSeries assemble(std::vector<Row> rows, std::string label, std::string baseline) {
  if (rows.size() < 2) throw ParseError("fewer than two annual values", 0);
  std::map<int, int> counts;
  for (const auto& r : rows) ++counts[r.year];
  for (const auto& [year, count] : counts) {
    if (count == 12) throw ParseError("year " + std::to_string(year) + " has 12 rows; monthly input is not supported", 0);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.year < b.year; });
  std::vector<double> values;
  values.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].year == rows[i - 1].year) {
      throw GapError("duplicate year " + std::to_string(rows[i].year) + " (line " + std::to_string(rows[i].line) + ")");
    }
    if (i > 0 && rows[i].year != rows[i - 1].year + 1) {
      throw GapError("missing year " + std::to_string(rows[i - 1].year + 1));
    }
    values.push_back(rows[i].value);
  }
  return AnnualSeries(rows.front().year, std::move(values), std::move(label), std::move(baseline));
}

AnnualSeries parse_hadcrut(std::string_view text, std::string label) {
  Lines lines(text);
  std::string_view line;
  std::vector<Row> rows;
  bool header = false;
  while (lines.next(line)) {
    if (trim(line).empty()) continue;
    const auto cells = split_csv(line);
    if (!header) {
      if (lower(cells[0]) != "time" && lower(cells[0]) != "year") throw ParseError("expected a 'Time' header", lines.number());
      header = true;
      continue;
    }
    if (cells.size() < 2) throw ParseError("expected at least 2 columns", lines.number());
    rows.push_back({to_year(cells[0], lines.number()), to_anomaly(cells[1], lines.number()), lines.number()});
  }
  return assemble(std::move(rows), std::move(label), "1961-1990");
}

AnnualSeries parse_noaa(std::string_view text, std::string label) {
  Lines lines(text);
  std::string_view line;
  std::vector<Row> rows;
  std::string baseline = "1901-2000";
  std::optional<double> missing;
  bool header = false;
  while (lines.next(line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (!header) {
      const auto colon = t.find(':');
      const std::string key = lower(t.substr(0, colon == std::string_view::npos ? 0 : colon));
      if (key == "base period") baseline = std::string(trim(t.substr(colon + 1)));
      if (key == "missing") missing = to_double(trim(t.substr(colon + 1)));
      const auto cells = split_csv(t);
      const std::string first = lower(cells[0]);
      if (first == "year" || first == "date") {
        if (cells.size() < 2) throw ParseError("expected 'Year,Anomaly' header", lines.number());
        header = true;
      }
      continue;
    }
    const auto cells = split_csv(t);
    if (cells.size() < 2) throw ParseError("expected 2 columns", lines.number());
    const int year = to_year(cells[0], lines.number());
    const double v = to_anomaly(cells[1], lines.number());
    if (missing && v == *missing) throw GapError("missing value for year " + std::to_string(year));
    rows.push_back({year, v, lines.number()});
  }
  if (!header) throw ParseError("no 'Year,Anomaly' header found", 0);
  return assemble(std::move(rows), std::move(label), baseline);
}

AnnualSeries parse_berkeley(std::string_view text, std::string label) {
  Lines lines(text);
  std::string_view line;
  std::vector<Row> rows;
  std::string baseline = "1951-1980";
  while (lines.next(line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '%') {
      // Only the first table is read; later tables repeat the years under
      // another sea-ice treatment.
      if (!rows.empty()) break;
      const std::string l = lower(t);
      if (l.find("month") != std::string::npos && l.find("year,") != std::string::npos) {
        throw ParseError("monthly Berkeley table; annual summary required", lines.number());
      }
      continue;
    }
    const auto cells = split_ws(t);
    if (cells.size() < 2) throw ParseError("expected year and anomaly columns", lines.number());
    const int year = to_year(cells[0], lines.number());
    if (lower(cells[1]) == "nan") throw GapError("missing value for year " + std::to_string(year));
    rows.push_back({year, to_anomaly(cells[1], lines.number()), lines.number()});
  }
  return assemble(std::move(rows), std::move(label), baseline);
}

AnnualSeries parse_nasa(std::string_view text, std::string label) {
  Lines lines(text);
  std::string_view line;
  std::vector<Row> rows;
  std::optional<std::size_t> column;
  std::optional<std::pair<int, std::size_t>> pending_missing;  // year, line
  while (lines.next(line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    const auto cells = split_csv(t);
    if (!column) {
      if (lower(cells[0]) == "year") {
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (lower(cells[i]) == "j-d") column = i;
        }
        if (!column) throw ParseError("no J-D column in header", lines.number());
      }
      continue;
    }
    if (lower(cells[0]) == "year") continue;  // repeated header blocks in the text layout
    if (pending_missing) {
      throw GapError("missing annual mean for year " + std::to_string(pending_missing->first) + " (line " +
                     std::to_string(pending_missing->second) + ")");
    }
    if (cells.size() <= *column) throw ParseError("row shorter than the header", lines.number());
    const int year = to_year(cells[0], lines.number());
    const auto cell = cells[*column];
    if (cell.find('*') != std::string_view::npos) {
      pending_missing = std::make_pair(year, lines.number());  // allowed only for the final, incomplete year
      continue;
    }
    rows.push_back({year, to_anomaly(cell, lines.number()), lines.number()});
  }
  if (!column) throw ParseError("no 'Year,...,J-D' header found", 0);
  return assemble(std::move(rows), std::move(label), "1951-1980");
}

AnnualSeries parse_normalized(std::string_view text, std::string label) {
  Lines lines(text);
  std::string_view line;
  std::vector<Row> rows;
  std::string baseline;
  bool header = false;
  while (lines.next(line)) {
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      const std::string l = lower(t);
      const auto at = l.find("baseline:");
      if (at != std::string::npos) baseline = std::string(trim(t.substr(at + 9)));
      continue;
    }
    const auto cells = split_csv(t);
    if (!header) {
      if (cells.size() != 2 || lower(cells[0]) != "year" || lower(cells[1]) != "anomaly") {
        throw ParseError("expected header 'year,anomaly'", lines.number());
      }
      header = true;
      continue;
    }
    if (cells.size() != 2) throw ParseError("expected 2 columns", lines.number());
    rows.push_back({to_year(cells[0], lines.number()), to_anomaly(cells[1], lines.number()), lines.number()});
  }
  if (!header) throw ParseError("empty file", 0);
  return assemble(std::move(rows), std::move(label), baseline);
}

bool is_url(const std::string& s) { return s.starts_with("http://") || s.starts_with("https://"); }

}  // namespace

DataSource parse_source(std::string_view name) {
  const std::string key = lower(name);
  if (key == "hadcrut" || key == "hadcrut5" || key == "hadley") return DataSource::hadcrut;
  if (key == "noaa" || key == "noaaglobaltemp") return DataSource::noaa;
  if (key == "berkeley" || key == "best") return DataSource::berkeley;
  if (key == "nasa" || key == "gistemp") return DataSource::nasa;
  if (key == "normalized" || key == "csv") return DataSource::normalized;
  throw DomainError("unknown data format '" + std::string(name) + "'");
}

std::string to_string(DataSource source) {
  switch (source) {
    case DataSource::hadcrut: return "hadcrut";
    case DataSource::noaa: return "noaa";
    case DataSource::berkeley: return "berkeley";
    case DataSource::nasa: return "nasa";
    case DataSource::normalized: return "normalized";
  }
  return "normalized";
}

void DatasetDescriptor::validate() const {
  if (path_or_url.empty()) throw DomainError("dataset location is empty");
  const auto in_range = [](int y) { return y == 0 || (y >= 1850 && y <= 2100); };
  if (!in_range(year_from) || !in_range(year_to)) throw DomainError("year range must lie within 1850-2100");
  if (year_from && year_to && year_from > year_to) throw DomainError("year range is reversed");
}

AnnualSeries parse_dataset(std::string_view text, DataSource source, std::string label) {
  switch (source) {
    case DataSource::hadcrut: return parse_hadcrut(text, std::move(label));
    case DataSource::noaa: return parse_noaa(text, std::move(label));
    case DataSource::berkeley: return parse_berkeley(text, std::move(label));
    case DataSource::nasa: return parse_nasa(text, std::move(label));
    case DataSource::normalized: return parse_normalized(text, std::move(label));
  }
  throw DomainError("unknown data source");
}

AnnualSeries ingest(const DatasetDescriptor& d) {
  d.validate();
  std::string text;
  if (is_url(d.path_or_url)) {
    text = fetch_url(d.path_or_url);
  } else {
    std::ifstream in(d.path_or_url, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + d.path_or_url);
    std::ostringstream buf;
    buf << in.rdbuf();
    text = buf.str();
  }
  std::string label = d.label.empty() ? to_string(d.source) : d.label;
  AnnualSeries s = parse_dataset(text, d.source, label);
  const int from = d.year_from ? d.year_from : s.start_year();
  const int to = d.year_to ? d.year_to : s.end_year();
  if (from < s.start_year() || to > s.end_year()) {
    throw GapError("requested years " + std::to_string(from) + "-" + std::to_string(to) + " not covered by " +
                   std::to_string(s.start_year()) + "-" + std::to_string(s.end_year()));
  }
  AnnualSeries out = s.slice(from, to);
  if (!d.baseline.empty()) {
    return AnnualSeries(out.start_year(), std::vector<double>(out.values().begin(), out.values().end()), label,
                        d.baseline);
  }
  return out;
}

std::string format_normalized(const AnnualSeries& series) {
  std::string out = "year,anomaly\n";
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    const int n = std::snprintf(buf, sizeof buf, "%d,%.6f\n", series.start_year() + static_cast<int>(i),
                                series.values()[i]);
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

void export_normalized(const AnnualSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_normalized(series);
  out.close();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace trendshift
