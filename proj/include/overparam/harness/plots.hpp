#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "overparam/harness/sweep.hpp"

namespace overparam::harness {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_y = true;
  std::vector<double> xticks;  // grid values, drawn on a log axis
  std::vector<Series> series;
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    if (c == '<') o += "&lt;";
    else if (c == '>') o += "&gt;";
    else if (c == '&') o += "&amp;";
    else o += c;
  }
  return o;
}

}  // namespace detail

/// Log-x line chart. Output depends only on the spec, so equal inputs give identical bytes.
inline std::string render_svg(const PlotSpec& p) {
  using detail::fmt;
  const double W = 680, H = 420, L = 80, R = 170, T = 40, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  double x0 = kInf, x1 = -kInf, y0 = kInf, y1 = -kInf;
  for (const auto& s : p.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  for (double t : p.xticks) {
    x0 = std::min(x0, t);
    x1 = std::max(x1, t);
  }
  if (!(x0 <= x1)) x0 = x1 = 1;
  if (!(y0 <= y1)) y0 = y1 = 1;
  const bool logy = p.log_y && y0 > 0;
  auto tx = [](double v) { return std::log10(v); };
  auto ty = [&](double v) { return logy ? std::log10(v) : v; };
  double lx0 = tx(x0), lx1 = tx(x1), ly0 = ty(y0), ly1 = ty(y1);
  if (lx1 - lx0 < 1e-12) lx0 -= 0.5, lx1 += 0.5;
  if (ly1 - ly0 < 1e-12) ly0 -= 0.5, ly1 += 0.5;
  const double pad = 0.05 * (ly1 - ly0);
  ly0 -= pad;
  ly1 += pad;
  auto px = [&](double v) { return L + pw * (tx(v) - lx0) / (lx1 - lx0); };
  auto py = [&](double v) { return T + ph * (1 - (ty(v) - ly0) / (ly1 - ly0)); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2",
                                 "#7f7f7f"};
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << L + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
    << detail::xml_escape(p.title) << "</text>\n";
  o << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : p.xticks) {
    const std::string x = fmt("%.2f", px(t));
    o << "<line x1=\"" << x << "\" y1=\"" << T + ph << "\" x2=\"" << x << "\" y2=\"" << T + ph + 5
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << x << "\" y=\"" << T + ph + 18 << "\" text-anchor=\"middle\">" << fmt("%g", t)
      << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double lv = ly0 + (ly1 - ly0) * k / 4.0;
    const double v = logy ? std::pow(10.0, lv) : lv;
    const std::string y = fmt("%.2f", py(v));
    o << "<line x1=\"" << L - 5 << "\" y1=\"" << y << "\" x2=\"" << L << "\" y2=\"" << y
      << "\" stroke=\"black\"/>\n";
    o << "<text x=\"" << L - 8 << "\" y=\"" << y << "\" text-anchor=\"end\" dominant-baseline=\"middle\">"
      << fmt("%.3g", v) << "</text>\n";
  }
  o << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
    << detail::xml_escape(p.xlabel) << "</text>\n";
  o << "<text transform=\"translate(18," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::xml_escape(p.ylabel) << "</text>\n";
  for (std::size_t s = 0; s < p.series.size(); ++s) {
    const auto& sr = p.series[s];
    const char* col = colors[s % 8];
    std::string pts;
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      pts += (i ? " " : "") + fmt("%.2f", px(sr.x[i])) + "," + fmt("%.2f", py(sr.y[i]));
    o << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"" << pts << "\"/>\n";
    for (std::size_t i = 0; i < sr.x.size(); ++i)
      o << "<circle cx=\"" << fmt("%.2f", px(sr.x[i])) << "\" cy=\"" << fmt("%.2f", py(sr.y[i])) << "\" r=\"3\" fill=\""
        << col << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(s);
    o << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 32 << "\" y2=\"" << ly
      << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
    o << "<text x=\"" << L + pw + 38 << "\" y=\"" << ly << "\" dominant-baseline=\"middle\">"
      << detail::xml_escape(sr.label) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

namespace detail {

// One series per (arch, variant[, other grid value]) in first-appearance order, sorted by x.
inline PlotSpec build_plot(const std::vector<SummaryRecord>& recs, bool by_m, double SummaryRecord::*field,
                           const std::string& title, const std::string& ylabel) {
  PlotSpec p;
  p.title = title;
  p.xlabel = by_m ? "m" : "N";
  p.ylabel = ylabel;
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> pts;
  std::vector<double> ticks;
  std::vector<Index> others;
  for (const auto& r : recs) {
    const Index other = by_m ? r.N : r.m;
    if (std::find(others.begin(), others.end(), other) == others.end()) others.push_back(other);
  }
  for (const auto& r : recs) {
    const double x = static_cast<double>(by_m ? r.m : r.N);
    if (std::find(ticks.begin(), ticks.end(), x) == ticks.end()) ticks.push_back(x);
    const double y = r.*field;
    if (r.status != "ok" || !std::isfinite(y)) continue;
    std::string label = r.arch;
    if (r.variant != "experiment") label += " " + r.variant;
    if (others.size() > 1) label += by_m ? " N=" + std::to_string(r.N) : " m=" + std::to_string(r.m);
    if (!pts.count(label)) order.push_back(label);
    pts[label].emplace_back(x, y);
  }
  std::sort(ticks.begin(), ticks.end());
  p.xticks = ticks;
  for (const auto& label : order) {
    auto v = pts[label];
    std::sort(v.begin(), v.end());
    Series s;
    s.label = label;
    for (const auto& [x, y] : v) {
      s.x.push_back(x);
      s.y.push_back(y);
    }
    p.series.push_back(std::move(s));
  }
  return p;
}

}  // namespace detail

/// One SVG per figure-style task found in the summary. Returns the written paths.
inline std::vector<std::filesystem::path> emit_plots(const std::vector<SummaryRecord>& recs,
                                                     const std::filesystem::path& out_dir) {
  if (recs.empty()) throw InvalidInput("emit_plots: empty summary");
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> tasks;
  for (const auto& r : recs)
    if (std::find(tasks.begin(), tasks.end(), r.task) == tasks.end()) tasks.push_back(r.task);
  std::vector<std::filesystem::path> written;
  auto write = [&](const std::string& name, const PlotSpec& p) {
    const auto path = out_dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << render_svg(p);
    written.push_back(path);
  };
  for (const auto& task : tasks) {
    std::vector<SummaryRecord> sub;
    for (const auto& r : recs)
      if (r.task == task) sub.push_back(r);
    if (task == "fig1b-sweep-N") {
      write(task + "_loss_vs_N.svg",
            detail::build_plot(sub, false, &SummaryRecord::median_test_loss, task, "median test loss"));
    } else {
      write(task + "_loss_vs_m.svg",
            detail::build_plot(sub, true, &SummaryRecord::median_test_loss, task, "median test loss"));
      if (task == "fig7-regularizer")
        write(task + "_ratio_vs_m.svg",
              detail::build_plot(sub, true, &SummaryRecord::median_ratio_w, task, "m ||W||_{2,4}^4 / ||W||_F^4"));
    }
  }
  return written;
}

inline std::vector<std::filesystem::path> emit_plots_from_csv(const std::filesystem::path& summary_csv,
                                                              const std::filesystem::path& out_dir) {
  std::ifstream in(summary_csv);
  if (!in) throw InvalidInput("cannot open summary: " + summary_csv.string());
  return emit_plots(read_summary_csv(in), out_dir);
}

}  // namespace overparam::harness
