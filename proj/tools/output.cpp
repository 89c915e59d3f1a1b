#include "output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gspt::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

CsvWriter& CsvWriter::row() {
  rows_.emplace_back();
  return *this;
}

CsvWriter& CsvWriter::add(double v) {
  rows_.back().push_back(format_double(v));
  return *this;
}

CsvWriter& CsvWriter::add(int v) {
  rows_.back().push_back(std::to_string(v));
  return *this;
}

CsvWriter& CsvWriter::add(bool v) {
  rows_.back().push_back(v ? "true" : "false");
  return *this;
}

CsvWriter& CsvWriter::add(const std::string& s) {
  rows_.back().push_back(quote(s));
  return *this;
}

std::string CsvWriter::str() const {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += "\r\n";
  };
  std::vector<std::string> h;
  for (const auto& s : header_) h.push_back(quote(s));
  line(h);
  for (const auto& r : rows_) {
    if (r.size() != header_.size()) throw std::logic_error("CsvWriter: row width does not match the header");
    line(r);
  }
  return out;
}

void CsvWriter::save(const std::filesystem::path& path) const { write_file(path, str()); }

// ---------------------------------------------------------------------------

SvgPlot::SvgPlot(std::string title, std::string xlabel, std::string ylabel)
    : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

void SvgPlot::set_log(bool logx, bool logy) {
  logx_ = logx;
  logy_ = logy;
}

void SvgPlot::add(Series s) { series_.push_back(std::move(s)); }
void SvgPlot::add_cell(Cell c) { cells_.push_back(std::move(c)); }

namespace {

// "nice" tick positions covering [lo, hi]
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) t.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
  return t;
}

std::string tick_label(double v, bool log) {
  std::ostringstream os;
  if (log) {
    os << "1e" << static_cast<int>(std::lround(v));
  } else {
    os.precision(4);
    os << v;
  }
  return os.str();
}

}  // namespace

std::string SvgPlot::render(int width, int height) const {
  auto tx = [&](double v) { return logx_ ? std::log10(v) : v; };
  auto ty = [&](double v) { return logy_ ? std::log10(v) : v; };
  auto ok = [&](const Vec2& p) {
    return std::isfinite(tx(p.x)) && std::isfinite(ty(p.y)) && (!logx_ || p.x > 0) && (!logy_ || p.y > 0);
  };

  Window r;
  if (fixed_range_) {
    r = {tx(range_.x_min), tx(range_.x_max), ty(range_.y_min), ty(range_.y_max)};
  } else {
    r = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
         std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    auto grow = [&](double x, double y) {
      r.x_min = std::min(r.x_min, x);
      r.x_max = std::max(r.x_max, x);
      r.y_min = std::min(r.y_min, y);
      r.y_max = std::max(r.y_max, y);
    };
    for (const auto& s : series_)
      for (const auto& p : s.points)
        if (ok(p)) grow(tx(p.x), ty(p.y));
    for (const auto& c : cells_) {
      grow(tx(c.x0), ty(c.y0));
      grow(tx(c.x1), ty(c.y1));
    }
    if (!(r.x_min <= r.x_max)) r = {0, 1, 0, 1};
    const double px = std::max(r.width(), 1e-12) * 0.05, py = std::max(r.height(), 1e-12) * 0.05;
    r = {r.x_min - px, r.x_max + px, r.y_min - py, r.y_max + py};
  }
  if (r.width() <= 0) r.x_max = r.x_min + 1;
  if (r.height() <= 0) r.y_max = r.y_min + 1;

  const double ml = 80, mr = 20, mt = 40, mb = 60;
  const double pw = width - ml - mr, ph = height - mt - mb;
  auto X = [&](double v) { return ml + (tx(v) - r.x_min) / r.width() * pw; };
  auto Y = [&](double v) { return mt + ph - (ty(v) - r.y_min) / r.height() * ph; };
  auto num = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2f", v);
    return std::string(b);
  };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n"
     << "<defs><clipPath id=\"plot\"><rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\"/></clipPath></defs>\n";
  os << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
     << xml_escape(title_) << "</text>\n";

  os << "<g clip-path=\"url(#plot)\">\n";
  for (const auto& c : cells_) {
    const double x0 = X(c.x0), x1 = X(c.x1), y0 = Y(c.y1), y1 = Y(c.y0);
    os << "<rect x=\"" << num(std::min(x0, x1)) << "\" y=\"" << num(std::min(y0, y1)) << "\" width=\""
       << num(std::fabs(x1 - x0)) << "\" height=\"" << num(std::fabs(y1 - y0)) << "\" fill=\"" << c.color
       << "\" stroke=\"white\"/>\n";
    if (!c.text.empty())
      os << "<text x=\"" << num(0.5 * (x0 + x1)) << "\" y=\"" << num(0.5 * (y0 + y1) + 5)
         << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(c.text) << "</text>\n";
  }
  for (const auto& s : series_) {
    if (s.markers) {
      for (const auto& p : s.points)
        if (ok(p))
          os << "<circle cx=\"" << num(X(p.x)) << "\" cy=\"" << num(Y(p.y)) << "\" r=\"" << num(2.0 * s.width)
             << "\" fill=\"" << s.color << "\"/>\n";
      continue;
    }
    // split at non-plottable points
    std::vector<std::string> runs(1);
    for (const auto& p : s.points) {
      if (!ok(p)) {
        if (!runs.back().empty()) runs.emplace_back();
        continue;
      }
      runs.back() += num(X(p.x)) + "," + num(Y(p.y)) + " ";
    }
    for (const auto& pts : runs)
      if (!pts.empty())
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"" << s.width << "\" points=\""
           << pts << "\"/>\n";
  }
  os << "</g>\n";

  // axes frame and ticks
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(r.x_min, r.x_max)) {
    const double px = ml + (t - r.x_min) / r.width() * pw;
    os << "<line x1=\"" << num(px) << "\" y1=\"" << mt + ph << "\" x2=\"" << num(px) << "\" y2=\"" << mt + ph + 5
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << num(px) << "\" y=\"" << mt + ph + 20
       << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(t, logx_) << "</text>\n";
  }
  for (double t : ticks(r.y_min, r.y_max)) {
    const double py = mt + ph - (t - r.y_min) / r.height() * ph;
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << num(py) << "\" x2=\"" << ml << "\" y2=\"" << num(py)
       << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << ml - 8 << "\" y=\"" << num(py + 4)
       << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(t, logy_) << "</text>\n";
  }
  os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" << xml_escape(xlabel_) << "</text>\n";
  os << "<text x=\"18\" y=\"" << mt + ph / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\""
     << " transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << xml_escape(ylabel_) << "</text>\n";

  // legend
  double ly = mt + 14;
  for (const auto& s : series_) {
    if (s.label.empty()) continue;
    os << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 130 << "\" y2=\"" << ly - 4
       << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << ml + pw - 125 << "\" y=\"" << ly << "\" font-family=\"sans-serif\" font-size=\"11\">"
       << xml_escape(s.label) << "</text>\n";
    ly += 16;
  }
  os << "</svg>\n";
  return os.str();
}

void SvgPlot::save(const std::filesystem::path& path) const { write_file(path, render()); }

}  // namespace gspt::cli
