#include "pheno/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace pheno {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// low feature value -> blue, high -> red
std::string value_color(double t) {
  t = std::clamp(t, 0.0, 1.0);
  int r = static_cast<int>(std::lround(54 + t * (235 - 54)));
  int g = static_cast<int>(std::lround(110 + t * (51 - 110)));
  int b = static_cast<int>(std::lround(235 + t * (85 - 235)));
  char buf[16];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
  return buf;
}

void text(std::ostringstream& s, double x, double y, const std::string& t,
          const std::string& anchor = "start", int size = 11,
          const std::string& fill = "#333333") {
  s << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-size=\"" << size
    << "\" font-family=\"sans-serif\" text-anchor=\"" << anchor << "\" fill=\"" << fill << "\">"
    << escape(t) << "</text>\n";
}

void line(std::ostringstream& s, double x1, double y1, double x2, double y2,
          const std::string& stroke, double width = 1, const std::string& dash = "") {
  s << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\""
    << num(y2) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << "\"";
  if (!dash.empty()) s << " stroke-dasharray=\"" << dash << "\"";
  s << "/>\n";
}

}  // namespace

std::string svg_summary_plot(const std::vector<SummaryFeature>& features,
                             std::size_t max_features) {
  const std::size_t n = std::min(max_features, features.size());
  const double row_h = 30, left = 250, plot_w = 520, top = 40;
  const double width = left + plot_w + 90, height = top + n * row_h + 50;

  double max_abs = 1e-12;
  for (std::size_t f = 0; f < n; ++f)
    for (double p : features[f].phis) max_abs = std::max(max_abs, std::abs(p));
  auto px = [&](double phi) { return left + plot_w / 2 + phi / max_abs * (plot_w / 2 - 10); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  text(s, left, 20, "feature contributions per participant", "start", 13, "#111111");
  line(s, left + plot_w / 2, top - 8, left + plot_w / 2, top + n * row_h + 8, "#888888", 1, "4 3");
  text(s, left + plot_w / 2, top + n * row_h + 26, "0", "middle");
  text(s, px(-max_abs), top + n * row_h + 26, "-" + num(max_abs), "middle");
  text(s, px(max_abs), top + n * row_h + 26, "+" + num(max_abs), "middle");

  for (std::size_t f = 0; f < n; ++f) {
    const SummaryFeature& feat = features[f];
    double cy = top + f * row_h + row_h / 2;
    line(s, left, cy, left + plot_w, cy, "#eeeeee", 1);
    std::string label = feat.name;
    if (label.size() > 40) label = label.substr(0, 37) + "...";
    text(s, left - 8, cy + 4, label, "end");
    double vmin = feat.values.empty() ? 0 : *std::min_element(feat.values.begin(), feat.values.end());
    double vmax = feat.values.empty() ? 1 : *std::max_element(feat.values.begin(), feat.values.end());
    for (std::size_t i = 0; i < feat.phis.size(); ++i) {
      // deterministic vertical jitter keeps overlapping dots readable
      double jitter = static_cast<double>((i * 2654435761u) % 9) - 4.0;
      double t = vmax > vmin ? (feat.values[i] - vmin) / (vmax - vmin) : 0.5;
      s << "<circle cx=\"" << num(px(feat.phis[i])) << "\" cy=\"" << num(cy + jitter)
        << "\" r=\"2.6\" fill=\"" << value_color(t) << "\" fill-opacity=\"0.8\"/>\n";
    }
    text(s, left + plot_w + 10, cy + 4, "mean|phi| " + num(feat.mean_abs_phi), "start", 10,
         "#777777");
  }
  // value colour legend
  double ly = top + n * row_h + 40;
  text(s, left, ly, "feature value:", "start", 10, "#555555");
  for (int i = 0; i <= 20; ++i) {
    s << "<rect x=\"" << num(left + 80 + i * 5) << "\" y=\"" << num(ly - 9)
      << "\" width=\"5\" height=\"10\" fill=\"" << value_color(i / 20.0) << "\"/>\n";
  }
  text(s, left + 76, ly, "low", "end", 10, "#555555");
  text(s, left + 80 + 21 * 5 + 4, ly, "high", "start", 10, "#555555");
  s << "</svg>\n";
  return s.str();
}

std::string svg_force_plot(const ShapExplanation& e, std::size_t max_labels) {
  const double width = 920, height = 230, left = 60, right = 60, axis_y = 110;
  const double span = width - left - right;
  auto px = [&](double p) { return left + std::clamp(p, 0.0, 1.0) * span; };

  std::vector<std::size_t> order(e.phi.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&e](std::size_t a, std::size_t b) {
    double aa = std::abs(e.phi[a]), bb = std::abs(e.phi[b]);
    if (aa != bb) return aa > bb;
    return e.feature_names[a] < e.feature_names[b];
  });

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  text(s, left, 24, "prediction breakdown: " + e.participant_id, "start", 13, "#111111");

  line(s, left, axis_y, left + span, axis_y, "#cccccc", 2);
  for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    line(s, px(tick), axis_y - 5, px(tick), axis_y + 5, "#999999", 1);
    text(s, px(tick), axis_y + 22, num(tick), "middle", 10, "#777777");
  }

  // contributions walk from the base value to the model output
  double cum = e.base_value;
  std::size_t labeled = 0;
  for (std::size_t i : order) {
    double phi = e.phi[i];
    if (phi == 0) continue;
    double x0 = px(cum), x1 = px(cum + phi);
    std::string color = phi > 0 ? "#e8465a" : "#3a78e0";
    double lo = std::min(x0, x1), w = std::max(std::abs(x1 - x0), 0.8);
    s << "<rect x=\"" << num(lo) << "\" y=\"" << num(axis_y - 14) << "\" width=\"" << num(w)
      << "\" height=\"12\" fill=\"" << color << "\" fill-opacity=\"0.75\"/>\n";
    if (labeled < max_labels) {
      double ly = 48 + (labeled % 3) * 16;
      std::string label = e.feature_names[i];
      if (label.size() > 34) label = label.substr(0, 31) + "...";
      text(s, (x0 + x1) / 2, ly, label + " (" + num(phi) + ")", "middle", 10,
           phi > 0 ? "#b02a3c" : "#255099");
      ++labeled;
    }
    cum += phi;
  }

  line(s, px(e.base_value), axis_y - 28, px(e.base_value), axis_y + 28, "#888888", 1, "5 3");
  text(s, px(e.base_value), axis_y + 44, "base " + num(e.base_value), "middle", 10, "#555555");
  line(s, px(e.fx), axis_y - 34, px(e.fx), axis_y + 34, "#111111", 1.5);
  text(s, px(e.fx), axis_y - 40, "output " + num(e.fx), "middle", 11, "#111111");
  s << "</svg>\n";
  return s.str();
}

}  // namespace pheno
