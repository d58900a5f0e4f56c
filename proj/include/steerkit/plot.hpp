// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "steerkit/isv.hpp"

namespace steer {

enum class PlotKind { kLayerEffectiveness, kAlphaSweep, kSimilarityProfile, kQualityTradeoff };

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view text);

/// One numeric table per figure. The first column is the x axis, the second
/// the plotted y value; further columns are carried in the data file only.
struct PlotTable {
  PlotKind kind = PlotKind::kAlphaSweep;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct LayerEffect {
  int layer_id = 0;
  double delta_bias = 0.0;
  double quality_after = 0.0;
};

struct SweepPoint {
  double alpha = 0.0;
  double delta_bias = 0.0;
  double bias_before = 0.0;
  double bias_after = 0.0;
  double quality_after = 0.0;
};

PlotTable layer_effectiveness_table(const std::vector<LayerEffect>& effects);
PlotTable alpha_sweep_table(const std::vector<SweepPoint>& points);
PlotTable similarity_profile_table(const std::vector<LayerSimilarity>& profile);
/// x = delta bias, y = quality after steering, one row per sweep point.
PlotTable quality_tradeoff_table(const std::vector<SweepPoint>& points);

/// Tab-separated: "# kind" line, header line, one line per row. Numbers use
/// format_number.
std::string render_plot_tsv(const PlotTable& table);
/// Self-contained SVG: bars for layer effectiveness, a polyline with markers
/// otherwise.
std::string render_plot_svg(const PlotTable& table);

struct PlotFiles {
  std::filesystem::path data;
  std::filesystem::path svg;
};

/// Writes <stem>.tsv and <stem>.svg. Throws DegenerateInput on an empty table.
PlotFiles emit_plot_data(const PlotTable& table, const std::filesystem::path& stem);

}  // namespace steer
