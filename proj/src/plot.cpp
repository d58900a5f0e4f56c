// SPDX-License-Identifier: Apache-2.0

#include "steerkit/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "steerkit/evals.hpp"
#include "steerkit/io.hpp"

namespace steer {

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::kLayerEffectiveness: return "layer_effectiveness";
    case PlotKind::kAlphaSweep: return "alpha_sweep";
    case PlotKind::kSimilarityProfile: return "similarity_profile";
    case PlotKind::kQualityTradeoff: return "quality_tradeoff";
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view text) {
  for (auto k : {PlotKind::kLayerEffectiveness, PlotKind::kAlphaSweep,
                 PlotKind::kSimilarityProfile, PlotKind::kQualityTradeoff}) {
    if (to_string(k) == text) return k;
  }
  throw ConfigError("unknown plot kind '" + std::string(text) + "'");
}

PlotTable layer_effectiveness_table(const std::vector<LayerEffect>& effects) {
  PlotTable t{PlotKind::kLayerEffectiveness, {"layer", "delta_bias", "quality_after"}, {}};
  for (const auto& e : effects) {
    t.rows.push_back({static_cast<double>(e.layer_id), e.delta_bias, e.quality_after});
  }
  return t;
}

PlotTable alpha_sweep_table(const std::vector<SweepPoint>& points) {
  PlotTable t{PlotKind::kAlphaSweep,
              {"alpha", "delta_bias", "bias_before", "bias_after", "quality_after"},
              {}};
  for (const auto& p : points) {
    t.rows.push_back({p.alpha, p.delta_bias, p.bias_before, p.bias_after, p.quality_after});
  }
  return t;
}

PlotTable similarity_profile_table(const std::vector<LayerSimilarity>& profile) {
  PlotTable t{PlotKind::kSimilarityProfile, {"layer", "cosine"}, {}};
  for (const auto& p : profile) t.rows.push_back({static_cast<double>(p.layer_id), p.cosine});
  return t;
}

PlotTable quality_tradeoff_table(const std::vector<SweepPoint>& points) {
  PlotTable t{PlotKind::kQualityTradeoff, {"delta_bias", "quality_after", "alpha"}, {}};
  for (const auto& p : points) t.rows.push_back({p.delta_bias, p.quality_after, p.alpha});
  return t;
}

namespace {

void check(const PlotTable& table) {
  if (table.rows.empty()) {
    throw DegenerateInput("plot " + std::string(to_string(table.kind)) + ": no data");
  }
  if (table.columns.size() < 2) throw ShapeError("plot table needs at least two columns");
  for (const auto& r : table.rows) {
    if (r.size() != table.columns.size()) throw ShapeError("plot row width != column count");
    for (double v : r) {
      if (!std::isfinite(v)) throw InvalidValue("plot data must be finite");
    }
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_plot_tsv(const PlotTable& table) {
  check(table);
  std::string out = "# " + std::string(to_string(table.kind)) + "\n";
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    out += (i ? "\t" : "") + table.columns[i];
  }
  out += '\n';
  for (const auto& r : table.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "\t" : "") + format_number(r[i]);
    out += '\n';
  }
  return out;
}

std::string render_plot_svg(const PlotTable& table) {
  check(table);
  constexpr double kW = 480, kH = 320, kLeft = 60, kRight = 20, kTop = 30, kBottom = 45;
  double x0 = table.rows[0][0], x1 = x0, y0 = 0.0, y1 = 0.0;
  for (const auto& r : table.rows) {
    x0 = std::min(x0, r[0]);
    x1 = std::max(x1, r[0]);
    y0 = std::min(y0, r[1]);
    y1 = std::max(y1, r[1]);
  }
  const bool bars = table.kind == PlotKind::kLayerEffectiveness;
  if (bars) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  if (x1 == x0) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (y1 == y0) y1 = y0 + 1.0;
  const auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * (kW - kLeft - kRight); };
  const auto py = [&](double y) { return kH - kBottom - (y - y0) / (y1 - y0) * (kH - kTop - kBottom); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\" "
                  "viewBox=\"0 0 480 320\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"480\" height=\"320\" fill=\"white\"/>\n";
  s += "<text x=\"240\" y=\"18\" text-anchor=\"middle\">" + std::string(to_string(table.kind)) +
       "</text>\n";
  // axes and zero line
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kH - kBottom) + "\" x2=\"" + fmt(kW - kRight) +
       "\" y2=\"" + fmt(kH - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" +
       fmt(kH - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(py(0.0)) + "\" x2=\"" + fmt(kW - kRight) +
       "\" y2=\"" + fmt(py(0.0)) + "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  s += "<text x=\"240\" y=\"" + fmt(kH - 8) + "\" text-anchor=\"middle\">" + table.columns[0] +
       "</text>\n";
  s += "<text x=\"14\" y=\"" + fmt(kH / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       fmt(kH / 2) + ")\">" + table.columns[1] + "</text>\n";
  s += "<text x=\"" + fmt(kLeft - 4) + "\" y=\"" + fmt(py(y1) + 4) + "\" text-anchor=\"end\">" +
       format_number(y1) + "</text>\n";
  s += "<text x=\"" + fmt(kLeft - 4) + "\" y=\"" + fmt(py(y0) + 4) + "\" text-anchor=\"end\">" +
       format_number(y0) + "</text>\n";

  if (bars) {
    const double w = 0.6 * (kW - kLeft - kRight) / (x1 - x0);
    for (const auto& r : table.rows) {
      const double top = std::min(py(r[1]), py(0.0));
      const double h = std::abs(py(r[1]) - py(0.0));
      s += "<rect x=\"" + fmt(px(r[0]) - w / 2) + "\" y=\"" + fmt(top) + "\" width=\"" + fmt(w) +
           "\" height=\"" + fmt(h) + "\" fill=\"#4477aa\"/>\n";
      s += "<text x=\"" + fmt(px(r[0])) + "\" y=\"" + fmt(kH - kBottom + 14) +
           "\" text-anchor=\"middle\">" + format_number(r[0]) + "</text>\n";
    }
  } else {
    std::string pts;
    for (const auto& r : table.rows) pts += fmt(px(r[0])) + "," + fmt(py(r[1])) + " ";
    pts.pop_back();
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"#4477aa\" stroke-width=\"2\"/>\n";
    for (const auto& r : table.rows) {
      s += "<circle cx=\"" + fmt(px(r[0])) + "\" cy=\"" + fmt(py(r[1])) +
           "\" r=\"3\" fill=\"#4477aa\"/>\n";
      s += "<text x=\"" + fmt(px(r[0])) + "\" y=\"" + fmt(kH - kBottom + 14) +
           "\" text-anchor=\"middle\">" + format_number(r[0]) + "</text>\n";
    }
  }
  s += "</svg>\n";
  return s;
}

PlotFiles emit_plot_data(const PlotTable& table, const std::filesystem::path& stem) {
  const std::string tsv = render_plot_tsv(table);
  const std::string svg = render_plot_svg(table);
  PlotFiles files{stem, stem};
  files.data += ".tsv";
  files.svg += ".svg";
  io::write_file(files.data, tsv);
  io::write_file(files.svg, svg);
  return files;
}

}  // namespace steer
