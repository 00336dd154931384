#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcvd::tool {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

void write_ser_svg(const std::string& path, const std::vector<CsvRow>& rows,
                   const std::string& title) {
  if (rows.empty()) throw std::runtime_error("no data to plot");

  const int width = 720, height = 480;
  const int ml = 70, mr = 170, mt = 40, mb = 50;  // margins; right holds legend
  const double pw = width - ml - mr, ph = height - mt - mb;

  double xmin = rows[0].x, xmax = rows[0].x;
  double ymin_pos = 1.0;
  for (const auto& r : rows) {
    xmin = std::min(xmin, r.x);
    xmax = std::max(xmax, r.x);
    if (r.ser > 0.0) ymin_pos = std::min(ymin_pos, r.ser);
  }
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  // decade-aligned log-y range; reserve one extra decade below for zeros
  const int top_exp = 0;
  int bot_exp = static_cast<int>(std::floor(std::log10(std::max(ymin_pos, 1e-12)))) - 1;
  bot_exp = std::max(bot_exp, -12);

  const auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  const auto sy = [&](double ser) {
    const double lv = ser > 0.0 ? std::log10(ser) : double(bot_exp);
    const double clamped = std::clamp(lv, double(bot_exp), double(top_exp));
    return mt + (top_exp - clamped) / (top_exp - bot_exp) * ph;
  };

  // preserve first-appearance order of series
  std::vector<std::string> series;
  std::map<std::string, std::vector<const CsvRow*>> by_series;
  for (const auto& r : rows) {
    if (!by_series.count(r.series)) series.push_back(r.series);
    by_series[r.series].push_back(&r);
  }

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write SVG: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << ml + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // gridlines and y labels (one per decade)
  for (int e = top_exp; e >= bot_exp; --e) {
    const double y = sy(std::pow(10.0, e));
    out << "<line x1=\"" << ml << "\" y1=\"" << fmt(y) << "\" x2=\"" << ml + pw
        << "\" y2=\"" << fmt(y) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(y + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << e
        << "</text>\n";
  }
  // x ticks: up to 8 evenly spaced values
  const int n_ticks = 6;
  for (int i = 0; i <= n_ticks; ++i) {
    const double x = xmin + (xmax - xmin) * i / n_ticks;
    out << "<line x1=\"" << fmt(sx(x)) << "\" y1=\"" << mt + ph << "\" x2=\"" << fmt(sx(x))
        << "\" y2=\"" << mt + ph + 5 << "\" stroke=\"#444444\"/>\n"
        << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(x)
        << "</text>\n";
  }
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#444444\"/>\n"
      << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << rows[0].parameter << "</text>\n"
      << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
      << "transform=\"rotate(-90 16 " << mt + ph / 2 << ")\">SER</text>\n";

  std::size_t color_idx = 0;
  int legend_y = mt + 10;
  for (const auto& name : series) {
    const char* color = kPalette[color_idx++ % (sizeof(kPalette) / sizeof(*kPalette))];
    auto pts = by_series[name];
    std::sort(pts.begin(), pts.end(),
              [](const CsvRow* a, const CsvRow* b) { return a->x < b->x; });
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto* p : pts) out << fmt(sx(p->x)) << ',' << fmt(sy(p->ser)) << ' ';
    out << "\"/>\n";
    for (const auto* p : pts) {
      out << "<circle cx=\"" << fmt(sx(p->x)) << "\" cy=\"" << fmt(sy(p->ser))
          << "\" r=\"3\" fill=\"" << (p->ser > 0.0 ? color : "white") << "\" stroke=\""
          << color << "\"/>\n";
    }
    out << "<line x1=\"" << ml + pw + 14 << "\" y1=\"" << legend_y << "\" x2=\""
        << ml + pw + 34 << "\" y2=\"" << legend_y << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"/>\n"
        << "<text x=\"" << ml + pw + 40 << "\" y=\"" << legend_y + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << name << "</text>\n";
    legend_y += 18;
  }
  out << "</svg>\n";
  if (!out) throw std::runtime_error("error writing SVG: " + path);
}

}  // namespace mcvd::tool
