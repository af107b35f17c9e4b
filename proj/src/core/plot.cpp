#include "plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "error.hpp"

namespace wbesprit::plot {

namespace {

using bench::Metric;
using bench::RmseRecord;

struct SeriesStyle {
  const char* color;
  const char* marker;  // "circle", "triangle", "diamond"
};

SeriesStyle style_for(Method m) {
  switch (m) {
    case Method::proposed: return {"#1f4fd8", "circle"};
    case Method::esprit3d: return {"#d81f1f", "triangle"};
    case Method::proposed_no_pairing: return {"#1f8f2a", "diamond"};
  }
  return {"#444444", "circle"};
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string axis_label(Metric m) {
  switch (m) {
    case Metric::aoa_rad: return "AOA RMSE [rad]";
    case Metric::aod_rad: return "AOD RMSE [rad]";
    case Metric::delay_ns: return "Delay RMSE [ns]";
    case Metric::position_m: return "Localization RMSE [m]";
  }
  return "RMSE";
}

void marker_svg(std::ostringstream& out, const char* shape, double x, double y,
                const char* color) {
  if (std::string(shape) == "circle") {
    out << "<circle class=\"marker\" cx=\"" << fmt(x) << "\" cy=\"" << fmt(y)
        << "\" r=\"3.2\" fill=\"" << color << "\"/>\n";
  } else if (std::string(shape) == "triangle") {
    out << "<polygon class=\"marker\" points=\"" << fmt(x) << "," << fmt(y - 4.0) << " "
        << fmt(x - 3.6) << "," << fmt(y + 3.0) << " " << fmt(x + 3.6) << "," << fmt(y + 3.0)
        << "\" fill=\"" << color << "\"/>\n";
  } else {
    out << "<polygon class=\"marker\" points=\"" << fmt(x) << "," << fmt(y - 4.2) << " "
        << fmt(x + 4.2) << "," << fmt(y) << " " << fmt(x) << "," << fmt(y + 4.2) << " "
        << fmt(x - 4.2) << "," << fmt(y) << "\" fill=\"" << color << "\"/>\n";
  }
}

}  // namespace

void emit_plot_records(const std::vector<RmseRecord>& records, const std::string& svg_path,
                       double threshold_hz_a, double threshold_hz_b) {
  if (records.empty()) {
    fail(Errc::validation, "emit_plot: no records");
  }

  const Metric metric_order[] = {Metric::aoa_rad, Metric::aod_rad, Metric::delay_ns,
                                 Metric::position_m};
  std::vector<Metric> metrics;
  for (Metric m : metric_order) {
    if (std::any_of(records.begin(), records.end(),
                    [&](const RmseRecord& r) { return r.metric == m && r.value > 0.0; })) {
      metrics.push_back(m);
    }
  }
  if (metrics.empty()) {
    fail(Errc::validation, "emit_plot: no plottable metrics");
  }

  constexpr double panel_w = 560.0, panel_h = 240.0;
  constexpr double margin_l = 70.0, margin_r = 25.0, margin_t = 30.0, margin_b = 45.0;
  const double fig_w = margin_l + panel_w + margin_r;
  const double fig_h = metrics.size() * (panel_h + margin_t + margin_b);

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(fig_w) << "\" height=\""
      << fmt(fig_h) << "\" viewBox=\"0 0 " << fmt(fig_w) << " " << fmt(fig_h) << "\">\n";
  out << "<style>text{font-family:sans-serif;font-size:11px;}.axis{stroke:#222;stroke-width:1;}"
         ".grid{stroke:#ddd;stroke-width:0.5;}.thresh{stroke:#777;stroke-width:1.2;}</style>\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  for (std::size_t pi = 0; pi < metrics.size(); ++pi) {
    const Metric metric = metrics[pi];
    const double oy = pi * (panel_h + margin_t + margin_b) + margin_t;

    double xmin = 1e300, xmax = 0.0, ymin = 1e300, ymax = 0.0;
    for (const auto& r : records) {
      if (r.metric != metric || !(r.value > 0.0)) continue;
      xmin = std::min(xmin, r.bandwidth_hz);
      xmax = std::max(xmax, r.bandwidth_hz);
      ymin = std::min(ymin, r.value);
      ymax = std::max(ymax, r.value);
    }
    const double lx0 = std::log10(xmin) - 0.05, lx1 = std::log10(xmax) + 0.05;
    const double ly0 = std::log10(ymin) - 0.3, ly1 = std::log10(ymax) + 0.3;
    auto px = [&](double hz) {
      return margin_l + (std::log10(hz) - lx0) / (lx1 - lx0) * panel_w;
    };
    auto py = [&](double v) {
      return oy + panel_h - (std::log10(v) - ly0) / (ly1 - ly0) * panel_h;
    };

    out << "<rect class=\"axis\" x=\"" << fmt(margin_l) << "\" y=\"" << fmt(oy) << "\" width=\""
        << fmt(panel_w) << "\" height=\"" << fmt(panel_h) << "\" fill=\"none\"/>\n";

    // Decade grid and tick labels (MHz decades).
    for (int e = static_cast<int>(std::floor(lx0 - 6.0));
         e <= static_cast<int>(std::ceil(lx1 - 6.0)); ++e) {
      const double hz = std::pow(10.0, e + 6);
      if (std::log10(hz) < lx0 || std::log10(hz) > lx1) continue;
      const double x = px(hz);
      out << "<line class=\"grid\" x1=\"" << fmt(x) << "\" y1=\"" << fmt(oy) << "\" x2=\""
          << fmt(x) << "\" y2=\"" << fmt(oy + panel_h) << "\"/>\n";
      out << "<text x=\"" << fmt(x - 8) << "\" y=\"" << fmt(oy + panel_h + 16) << "\">"
          << fmt(hz / 1e6) << "</text>\n";
    }
    for (int e = static_cast<int>(std::floor(ly0)); e <= static_cast<int>(std::ceil(ly1)); ++e) {
      const double v = std::pow(10.0, e);
      if (std::log10(v) < ly0 || std::log10(v) > ly1) continue;
      const double y = py(v);
      out << "<line class=\"grid\" x1=\"" << fmt(margin_l) << "\" y1=\"" << fmt(y) << "\" x2=\""
          << fmt(margin_l + panel_w) << "\" y2=\"" << fmt(y) << "\"/>\n";
      out << "<text x=\"" << fmt(margin_l - 52) << "\" y=\"" << fmt(y + 4) << "\">1e" << e
          << "</text>\n";
    }

    // Narrowband threshold verticals.
    for (double thz : {threshold_hz_a, threshold_hz_b}) {
      if (thz <= 0.0 || std::log10(thz) < lx0 || std::log10(thz) > lx1) continue;
      const double x = px(thz);
      const char* dash = thz == threshold_hz_a ? "" : " stroke-dasharray=\"7,3,2,3\"";
      out << "<line class=\"thresh\" x1=\"" << fmt(x) << "\" y1=\"" << fmt(oy) << "\" x2=\""
          << fmt(x) << "\" y2=\"" << fmt(oy + panel_h) << "\"" << dash << "/>\n";
      out << "<text x=\"" << fmt(x + 3) << "\" y=\"" << fmt(oy + 12) << "\" fill=\"#777\">"
          << fmt(thz / 1e6) << " MHz</text>\n";
    }

    // One polyline + markers per method, in first-appearance order.
    std::vector<Method> methods;
    for (const auto& r : records) {
      if (r.metric == metric && std::find(methods.begin(), methods.end(), r.method) == methods.end()) {
        methods.push_back(r.method);
      }
    }
    double legend_y = oy + panel_h - 10.0 - 14.0 * (methods.size() - 1);
    for (Method m : methods) {
      std::vector<const RmseRecord*> pts;
      for (const auto& r : records) {
        if (r.metric == metric && r.method == m && r.value > 0.0) pts.push_back(&r);
      }
      std::sort(pts.begin(), pts.end(), [](const RmseRecord* a, const RmseRecord* b) {
        return a->bandwidth_hz < b->bandwidth_hz;
      });
      if (pts.empty()) continue;
      const SeriesStyle st = style_for(m);
      out << "<polyline fill=\"none\" stroke=\"" << st.color << "\" stroke-width=\"1.8\" points=\"";
      for (const auto* p : pts) out << fmt(px(p->bandwidth_hz)) << "," << fmt(py(p->value)) << " ";
      out << "\"/>\n";
      for (const auto* p : pts) marker_svg(out, st.marker, px(p->bandwidth_hz), py(p->value), st.color);

      marker_svg(out, st.marker, margin_l + 14.0, legend_y, st.color);
      out << "<text x=\"" << fmt(margin_l + 24.0) << "\" y=\"" << fmt(legend_y + 4) << "\">"
          << method_name(m) << "</text>\n";
      legend_y += 14.0;
    }

    out << "<text x=\"" << fmt(margin_l + panel_w / 2 - 50) << "\" y=\""
        << fmt(oy + panel_h + 32) << "\">Bandwidth [MHz]</text>\n";
    out << "<text x=\"" << fmt(margin_l - 56) << "\" y=\"" << fmt(oy - 8) << "\">"
        << axis_label(metric) << "</text>\n";
  }
  out << "</svg>\n";

  std::FILE* f = std::fopen(svg_path.c_str(), "wb");
  if (!f) {
    fail(Errc::io, "emit_plot: cannot open " + svg_path);
  }
  const std::string s = out.str();
  const bool ok = std::fwrite(s.data(), 1, s.size(), f) == s.size();
  std::fclose(f);
  if (!ok) {
    fail(Errc::io, "emit_plot: write failed for " + svg_path);
  }
}

void emit_plot(const std::string& csv_path, const std::string& svg_path, double threshold_hz_a,
               double threshold_hz_b) {
  emit_plot_records(bench::parse_csv(csv_path), svg_path, threshold_hz_a, threshold_hz_b);
}

}  // namespace wbesprit::plot
