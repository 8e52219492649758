#include "bni/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "bni/regression.hpp"

namespace bni {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
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

const char* method_colour(Method m) {
  switch (m) {
    case Method::gcomp: return "#7aa6c2";
    case Method::aipw: return "#e39c5a";
    case Method::saipw: return "#8fbf7f";
  }
  return "#999999";
}

struct Box {
  std::string scenario;
  Method method;
  double q1, med, q3, lo, hi;
};

}  // namespace

void write_ab_boxplot_svg(std::ostream& out, const std::vector<AbRow>& rows, EffectKind kind,
                          const std::string& title) {
  std::vector<std::string> scenarios;
  for (const auto& r : rows) {
    if (r.spec.kind == kind && std::find(scenarios.begin(), scenarios.end(), r.scenario) == scenarios.end()) {
      scenarios.push_back(r.scenario);
    }
  }
  const Method methods[] = {Method::gcomp, Method::aipw, Method::saipw};
  std::vector<Box> boxes;
  double ymax = 0.0;
  for (const auto& sc : scenarios) {
    for (Method m : methods) {
      std::vector<double> v;
      for (const auto& r : rows) {
        if (r.scenario == sc && r.spec.kind == kind && r.spec.method == m && std::isfinite(r.ab)) v.push_back(r.ab);
      }
      if (v.empty()) continue;
      std::sort(v.begin(), v.end());
      Box b{sc, m, quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75), 0, 0};
      const double iqr = b.q3 - b.q1;
      b.lo = *std::lower_bound(v.begin(), v.end(), b.q1 - 1.5 * iqr);
      b.hi = *(std::upper_bound(v.begin(), v.end(), b.q3 + 1.5 * iqr) - 1);
      ymax = std::max(ymax, b.hi);
      boxes.push_back(b);
    }
  }
  if (!(ymax > 0.0)) ymax = 1.0;

  const double left = 60, top = 40, plot_h = 300, group_w = 120, box_w = 28;
  const double width = left + group_w * static_cast<double>(std::max<std::size_t>(1, scenarios.size())) + 130;
  const double height = top + plot_h + 60;
  const auto ypos = [&](double v) { return top + plot_h * (1.0 - v / ymax); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left) << "\" y=\"20\" font-size=\"14\">" << escape(title) << "</text>\n";
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(top) << "\" x2=\"" << num(left) << "\" y2=\""
      << num(top + plot_h) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = ymax * t / 4.0;
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(ypos(v) + 4) << "\" text-anchor=\"end\">" << num(v)
        << "</text>\n";
    out << "<line x1=\"" << num(left) << "\" y1=\"" << num(ypos(v)) << "\" x2=\"" << num(width - 130)
        << "\" y2=\"" << num(ypos(v)) << "\" stroke=\"#dddddd\"/>\n";
  }
  out << "<text x=\"15\" y=\"" << num(top + plot_h / 2) << "\" transform=\"rotate(-90 15 " << num(top + plot_h / 2)
      << ")\" text-anchor=\"middle\">AB (%)</text>\n";

  for (std::size_t s = 0; s < scenarios.size(); ++s) {
    const double gx = left + group_w * static_cast<double>(s);
    out << "<text x=\"" << num(gx + group_w / 2) << "\" y=\"" << num(top + plot_h + 20)
        << "\" text-anchor=\"middle\">" << escape(scenarios[s]) << "</text>\n";
    for (const auto& b : boxes) {
      if (b.scenario != scenarios[s]) continue;
      const double cx = gx + 18 + (box_w + 6) * static_cast<int>(b.method) + box_w / 2;
      out << "<line x1=\"" << num(cx) << "\" y1=\"" << num(ypos(b.hi)) << "\" x2=\"" << num(cx) << "\" y2=\""
          << num(ypos(b.lo)) << "\" stroke=\"black\"/>\n";
      out << "<rect class=\"box\" x=\"" << num(cx - box_w / 2) << "\" y=\"" << num(ypos(b.q3)) << "\" width=\"" << num(box_w)
          << "\" height=\"" << num(std::max(1.0, ypos(b.q1) - ypos(b.q3))) << "\" fill=\""
          << method_colour(b.method) << "\" stroke=\"black\"/>\n";
      out << "<line x1=\"" << num(cx - box_w / 2) << "\" y1=\"" << num(ypos(b.med)) << "\" x2=\""
          << num(cx + box_w / 2) << "\" y2=\"" << num(ypos(b.med)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    }
  }
  const double lx = width - 110;
  for (Method m : methods) {
    const double ly = top + 20 * static_cast<int>(m);
    out << "<rect x=\"" << num(lx) << "\" y=\"" << num(ly) << "\" width=\"12\" height=\"12\" fill=\""
        << method_colour(m) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(lx + 18) << "\" y=\"" << num(ly + 10) << "\">" << to_string(m) << "</text>\n";
  }
  out << "</svg>\n";
}

void write_forest_svg(std::ostream& out, const DiscoveryReport& report) {
  double lo = 0.0, hi = 0.0;
  for (const auto& r : report.rows) {
    if (std::isfinite(r.ci_lower)) lo = std::min(lo, r.ci_lower);
    if (std::isfinite(r.ci_upper)) hi = std::max(hi, r.ci_upper);
  }
  if (hi - lo <= 0.0) hi = lo + 1.0;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  const double left = 160, top = 40, plot_w = 360, row_h = 26;
  const double height = top + row_h * static_cast<double>(report.rows.size()) + 50;
  const auto xpos = [&](double v) { return left + plot_w * (v - lo) / (hi - lo); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(left + plot_w + 40) << "\" height=\""
      << num(height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"10\" y=\"20\" font-size=\"14\">" << escape(report.method + " " + report.estimand)
      << " effect modifiers</text>\n";
  const double bottom = top + row_h * static_cast<double>(report.rows.size());
  out << "<line x1=\"" << num(xpos(0)) << "\" y1=\"" << num(top - 5) << "\" x2=\"" << num(xpos(0)) << "\" y2=\""
      << num(bottom) << "\" stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n";
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    const auto& r = report.rows[k];
    const double y = top + row_h * (static_cast<double>(k) + 0.5);
    const char* colour = r.significant ? "#b2182b" : "#555555";
    out << "<text x=\"" << num(left - 10) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
        << escape(r.covariate) << "</text>\n";
    out << "<line x1=\"" << num(xpos(r.ci_lower)) << "\" y1=\"" << num(y) << "\" x2=\"" << num(xpos(r.ci_upper))
        << "\" y2=\"" << num(y) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    out << "<circle cx=\"" << num(xpos(r.coefficient)) << "\" cy=\"" << num(y) << "\" r=\"4\" fill=\"" << colour
        << "\"/>\n";
  }
  out << "<line x1=\"" << num(left) << "\" y1=\"" << num(bottom + 5) << "\" x2=\"" << num(left + plot_w)
      << "\" y2=\"" << num(bottom + 5) << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    out << "<text x=\"" << num(xpos(v)) << "\" y=\"" << num(bottom + 20) << "\" text-anchor=\"middle\">" << num(v)
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace bni
