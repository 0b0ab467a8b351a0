#pragma once

#include <string>
#include <vector>

namespace trendshift::plot {

struct Line {
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
  double width = 1.5;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<double> points_x;  // scatter + thin connecting line
  std::vector<double> points_y;
  std::vector<Line> lines;
  std::vector<double> vlines;  // dashed markers
};

/// Static line chart; output depends only on the inputs.
std::string line_chart(const Chart& chart, int width = 860, int height = 420);

struct Heatmap {
  std::string title;
  std::vector<int> rows;  // row labels (top to bottom)
  std::vector<int> cols;  // column labels (left to right)
  std::vector<std::vector<double>> value;   // colour and first annotation line
  std::vector<std::vector<double>> detail;  // second annotation line, may be empty
  std::string value_format = "%.0f%%";
  std::string detail_format = "%.3f";
  std::string row_label;
  std::string col_label;
};

std::string heatmap(const Heatmap& map);

}  // namespace trendshift::plot
