#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gspt/geometry.hpp"

namespace gspt::cli {

/// RFC-4180-ish CSV: header row, '.' decimals, numbers as %.17g.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& row();
  CsvWriter& add(double v);
  CsvWriter& add(int v);
  CsvWriter& add(bool v);
  CsvWriter& add(const std::string& s);
  CsvWriter& add(const char* s) { return add(std::string(s)); }
  std::string str() const;
  void save(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_double(double v);

struct Series {
  std::vector<Vec2> points;
  std::string color = "black";
  double width = 1.5;
  bool markers = false;  // draw circles instead of a line
  std::string label;
};

struct Cell {
  double x0, x1, y0, y1;  // data coordinates
  std::string color;
  std::string text;
};

/// Minimal standalone SVG 1.1 plot: axes, ticks, polylines, markers, rectangles.
class SvgPlot {
 public:
  SvgPlot(std::string title, std::string xlabel, std::string ylabel);
  void set_log(bool logx, bool logy);
  void add(Series s);
  void add_cell(Cell c);
  void set_range(const Window& w) { range_ = w; fixed_range_ = true; }
  std::string render(int width = 720, int height = 540) const;
  void save(const std::filesystem::path& path) const;

 private:
  std::string title_, xlabel_, ylabel_;
  bool logx_ = false, logy_ = false;
  std::vector<Series> series_;
  std::vector<Cell> cells_;
  Window range_;
  bool fixed_range_ = false;
};

}  // namespace gspt::cli
