#include "nsdi/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace nsdi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

std::optional<double> number(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

struct Point {
  double x;
  double y;
};

std::vector<std::vector<Point>> read_series(std::string_view csv) {
  std::vector<std::vector<Point>> segments(1);
  bool first_row = true;
  std::size_t line_no = 0;
  while (!csv.empty()) {
    ++line_no;
    const auto eol = csv.find('\n');
    const std::string_view line = trim(csv.substr(0, eol));
    csv = eol == std::string_view::npos ? std::string_view{} : csv.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto c1 = line.find(',');
    const std::string_view xs = line.substr(0, c1);
    std::string_view ys;
    if (c1 != std::string_view::npos) {
      const auto rest = line.substr(c1 + 1);
      ys = rest.substr(0, rest.find(','));
    }
    const auto x = number(xs);
    if (first_row && !x) {  // header
      first_row = false;
      continue;
    }
    first_row = false;
    if (!x) throw std::invalid_argument("render_svg: non-numeric x on line " + std::to_string(line_no));
    if (trim(ys).empty()) {
      if (!segments.back().empty()) segments.emplace_back();
      continue;
    }
    const auto y = number(ys);
    if (!y) throw std::invalid_argument("render_svg: non-numeric y on line " + std::to_string(line_no));
    segments.back().push_back({*x, *y});
  }
  std::erase_if(segments, [](const auto& s) { return s.empty(); });
  return segments;
}

}  // namespace

std::string render_svg(std::string_view csv_content, const SvgStyle& style) {
  const auto segments = read_series(csv_content);
  std::size_t count = 0;
  for (const auto& s : segments) count += s.size();
  if (count < 2) throw std::invalid_argument("render_svg: need at least two data rows");

  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const auto& s : segments)
    for (const auto& p : s) {
      x_lo = std::min(x_lo, p.x);
      x_hi = std::max(x_hi, p.x);
      y_lo = std::min(y_lo, p.y);
      y_hi = std::max(y_hi, p.y);
    }
  for (double m : style.markers) {
    x_lo = std::min(x_lo, m);
    x_hi = std::max(x_hi, m);
  }
  y_lo = std::min(y_lo, 0.0);
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;

  const double left = 80, right = 20, top = 40, bottom = 50;
  const double plot_w = style.width - left - right;
  const double plot_h = style.height - top - bottom;
  const auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  const auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!style.title.empty())
    svg << "<text x=\"" << style.width / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
        << escape(style.title) << "</text>\n";

  const std::string x0 = fmt("%.2f", left), x1 = fmt("%.2f", left + plot_w);
  const std::string y0 = fmt("%.2f", top + plot_h), y1 = fmt("%.2f", top);
  svg << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\"/>\n"
      << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1 << "\"/>\n"
      << "</g>\n";
  svg << "<g font-size=\"11\">\n"
      << "<text x=\"" << x0 << "\" y=\"" << fmt("%.2f", top + plot_h + 16) << "\" text-anchor=\"middle\">"
      << fmt("%.4g", x_lo) << "</text>\n"
      << "<text x=\"" << x1 << "\" y=\"" << fmt("%.2f", top + plot_h + 16) << "\" text-anchor=\"middle\">"
      << fmt("%.4g", x_hi) << "</text>\n"
      << "<text x=\"" << fmt("%.2f", left - 6) << "\" y=\"" << y0 << "\" text-anchor=\"end\">"
      << fmt("%.4g", y_lo) << "</text>\n"
      << "<text x=\"" << fmt("%.2f", left - 6) << "\" y=\"" << fmt("%.2f", top + 4) << "\" text-anchor=\"end\">"
      << fmt("%.4g", y_hi) << "</text>\n"
      << "</g>\n";
  if (!style.x_label.empty())
    svg << "<text x=\"" << fmt("%.2f", left + plot_w / 2) << "\" y=\"" << style.height - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(style.x_label) << "</text>\n";
  if (!style.y_label.empty())
    svg << "<text x=\"16\" y=\"" << fmt("%.2f", top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"13\""
        << " transform=\"rotate(-90 16 " << fmt("%.2f", top + plot_h / 2) << ")\">" << escape(style.y_label)
        << "</text>\n";

  for (double m : style.markers) {
    const std::string mx = fmt("%.2f", px(m));
    svg << "<line class=\"marker\" x1=\"" << mx << "\" y1=\"" << y0 << "\" x2=\"" << mx << "\" y2=\"" << y1
        << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (const auto& s : segments) {
    if (s.size() < 2) continue;
    svg << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < s.size(); ++k)
      svg << (k ? " " : "") << fmt("%.2f", px(s[k].x)) << ',' << fmt("%.2f", py(s[k].y));
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace nsdi
