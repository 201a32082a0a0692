#include "kartel/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace kartel::svg {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 140;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

std::string escape_text(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Frame {
  double x0, x1, y0, y1;
  int width, height;

  double px(double x) const {
    const double w = width - kMarginLeft - kMarginRight;
    return kMarginLeft + (x1 > x0 ? (x - x0) / (x1 - x0) : 0.5) * w;
  }
  double py(double y) const {
    const double h = height - kMarginTop - kMarginBottom;
    return kMarginTop + h - (y1 > y0 ? (y - y0) / (y1 - y0) : 0.5) * h;
  }
};

std::string header(int width, int height, const std::string& title) {
  return fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      width, height, width / 2, escape_text(title));
}

std::string axes(const Frame& f, const std::string& x_label, const std::string& y_label, int ticks = 5) {
  std::string out;
  const double left = kMarginLeft;
  const double bottom = f.height - kMarginBottom;
  const double right = f.width - kMarginRight;
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", left, bottom, right);
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{0}\" y2=\"{2}\" stroke=\"black\"/>\n", left, bottom, kMarginTop);
  for (int i = 0; i <= ticks; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / ticks;
    const double yv = f.y0 + (f.y1 - f.y0) * i / ticks;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n", f.px(xv), bottom + 16, xv);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 6, f.py(yv) + 4, yv);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", (left + right) / 2, f.height - 12,
                     escape_text(x_label));
  out += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                     (bottom + kMarginTop) / 2.0, (bottom + kMarginTop) / 2.0, escape_text(y_label));
  return out;
}

}  // namespace

std::string line_chart(const std::vector<Series>& series, const ChartOptions& o) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (first) {
        x0 = x1 = s.x[i];
        y0 = y1 = s.y[i];
        first = false;
      }
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  const Frame f{x0, x1, std::min(y0, 0.0), std::max(y1, y0 + 1e-12), o.width, o.height};
  std::string out = header(o.width, o.height, o.title);
  out += axes(f, o.x_label, o.y_label);
  int legend_y = kMarginTop + 10;
  for (const auto& s : series) {
    std::string points;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      points += fmt::format("{:.2f},{:.2f} ", f.px(s.x[i]), f.py(s.y[i]));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", s.color, points);
    const int lx = o.width - kMarginRight + 10;
    out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"3\"/>\n", lx, legend_y,
                       lx + 20, legend_y, s.color);
    out += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", lx + 26, legend_y + 4, escape_text(s.name));
    legend_y += 18;
  }
  out += "</svg>\n";
  return out;
}

std::string trajectory_chart(const SimulationRun& run, const std::string& title) {
  static const char* colors[] = {"#d62728", "#1f77b4", "#2ca02c"};
  std::vector<Series> series;
  for (std::size_t t = 0; t < kStrategyCount; ++t) {
    Series s{to_string(static_cast<StrategyType>(t)), colors[t], {}, {}};
    for (const auto& p : run.trajectory) {
      s.x.push_back(static_cast<double>(p.auction_index));
      s.y.push_back(p.shares[t]);
    }
    series.push_back(std::move(s));
  }
  return line_chart(series, {title, "auction", "share of population", 720, 420});
}

std::string waterfall_chart(const ShapleyExplanation& e) {
  const auto rows = waterfall(e);
  const int bar_h = 22;
  const int height = kMarginTop + kMarginBottom + bar_h * static_cast<int>(rows.size());
  const int width = 720;
  double lo = std::min(e.base_value, e.predicted);
  double hi = std::max(e.base_value, e.predicted);
  for (const auto& r : rows) {
    lo = std::min(lo, r.cumulative);
    hi = std::max(hi, r.cumulative);
  }
  const double pad = std::max(0.02, 0.05 * (hi - lo));
  const Frame f{lo - pad, hi + pad, 0.0, 1.0, width, height};
  std::string out = header(width, height, fmt::format("Auction {}: P(cartel) {:.3f}", e.auction_id, e.predicted));
  const double bottom = height - kMarginBottom;
  out += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"black\"/>\n", kMarginLeft, bottom,
                     width - kMarginRight);
  for (int i = 0; i <= 4; ++i) {
    const double v = f.x0 + (f.x1 - f.x0) * i / 4;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3f}</text>\n", f.px(v), bottom + 16, v);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">expected P(cartel)</text>\n",
                     (kMarginLeft + width - kMarginRight) / 2.0, height - 12);
  // Most important contribution on top.
  double y = kMarginTop;
  for (auto it = rows.rbegin(); it != rows.rend(); ++it, y += bar_h) {
    const auto& r = *it;
    const std::string label = r.feature ? fmt::format("bid {}", *r.feature + 1) : "base";
    out += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", kMarginLeft - 6, y + bar_h * 0.65,
                       label);
    if (!r.feature) {
      out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"gray\"/>\n",
                         f.px(r.cumulative), y + 2, y + bar_h - 2);
      continue;
    }
    const double a = f.px(r.cumulative - r.phi);
    const double b = f.px(r.cumulative);
    const char* color = r.phi > 0 ? "#ff0051" : "#008bfb";
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{}\" fill=\"{}\"/>\n", std::min(a, b),
                       y + 3, std::max(1.0, std::abs(b - a)), bar_h - 6, color);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{:+.3f}</text>\n", std::max(a, b) + 4, y + bar_h * 0.65, r.phi);
  }
  out += "</svg>\n";
  return out;
}

std::string summary_chart(const GlobalSummary& s) {
  const int n = static_cast<int>(s.mean_abs_phi.size());
  const int width = 720;
  const int height = kMarginTop + kMarginBottom + 26 * std::max(n, 1);
  double hi = 1e-9;
  for (const auto& p : s.scatter) hi = std::max(hi, std::abs(p.phi));
  const Frame f{0.0, hi * 1.05, 0.5, n + 0.5, width, height};
  std::string out = header(width, height, "Mean |Shapley value| by bid position");
  out += axes(f, "|phi|", "bid position", 4);
  for (const auto& p : s.scatter) {
    out += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"2.5\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
                       f.px(std::abs(p.phi)), f.py(p.feature + 1), p.phi > 0 ? "#ff0051" : "#008bfb");
  }
  for (int i = 0; i < n; ++i) {
    const double x = f.px(s.mean_abs_phi[static_cast<std::size_t>(i)]);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
                       x, f.py(i + 1) - 8, f.py(i + 1) + 8);
  }
  out += "</svg>\n";
  return out;
}

}  // namespace kartel::svg
