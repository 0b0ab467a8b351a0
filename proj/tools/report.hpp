#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "trendshift/core_types.hpp"
#include "trendshift/diagnostics.hpp"
#include "trendshift/segmentation.hpp"
#include "trendshift/surge_test.hpp"

namespace trendshift::report {

using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

ordered_json series_json(const AnnualSeries& s);
ordered_json spec_json(const ModelSpec& spec);
/// Changepoints and segment table in calendar years.
ordered_json fit_json(const FitResult& fit, const AnnualSeries& s);
ordered_json search_json(const SearchStats& stats);
ordered_json diagnostics_json(const DiagnosticsReport& d);
ordered_json quantile_json(const QuantileEstimate& q);
ordered_json null_json(const NullParams& p);
ordered_json grid_json(const SurgeGrid& g);

/// Writes text exactly (LF line endings, no BOM).
void write_text(const std::filesystem::path& path, const std::string& text);
/// Two-space indented JSON plus trailing newline.
void write_json(const std::filesystem::path& path, const ordered_json& j);

}  // namespace trendshift::report
