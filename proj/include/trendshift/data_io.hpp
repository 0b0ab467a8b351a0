#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

#include "trendshift/core_types.hpp"

namespace trendshift {

/// Malformed input; line() is 1-based, 0 when not tied to a line.
class ParseError : public DomainError {
 public:
  ParseError(const std::string& what, std::size_t line)
      : DomainError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Missing or repeated years.
class GapError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class DataSource { hadcrut, noaa, berkeley, nasa, normalized };

DataSource parse_source(std::string_view name);
std::string to_string(DataSource source);

struct DatasetDescriptor {
  DataSource source = DataSource::normalized;
  std::string path_or_url;
  int year_from = 0;  // 0: first year in the file
  int year_to = 0;    // 0: last year in the file
  std::string baseline;  // overrides the baseline read from the file
  std::string label;

  void validate() const;
};

/// Parses file contents in the given layout:
///   hadcrut     Met Office summary CSV (year, anomaly, lower, upper)
///   noaa        NOAA global time-series CSV with a metadata preamble
///   berkeley    Berkeley Earth annual summary text, '%' comments
///   nasa        GISTEMP table CSV; the J-D column is used and a trailing
///               year with a missing annual mean is dropped
///   normalized  "year,anomaly" with a header row
/// Monthly files are rejected.
AnnualSeries parse_dataset(std::string_view text, DataSource source, std::string label = {});

/// Reads (or, for http/https locations, downloads) and parses a dataset, then
/// restricts it to the requested year range.
AnnualSeries ingest(const DatasetDescriptor& descriptor);

/// GET with a fixed timeout and no retries. Throws std::runtime_error.
std::string fetch_url(const std::string& url, std::chrono::seconds timeout = std::chrono::seconds(30));

/// "year,anomaly" CSV, six decimals, LF line endings.
std::string format_normalized(const AnnualSeries& series);
void export_normalized(const AnnualSeries& series, const std::filesystem::path& path);

}  // namespace trendshift
