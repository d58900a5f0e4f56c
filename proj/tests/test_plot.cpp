// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <charconv>
#include <filesystem>

#include "steerkit/io.hpp"
#include "steerkit/plot.hpp"

using namespace steer;

namespace {

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string::npos; p = s.find(needle, p + 1)) ++n;
  return n;
}

std::vector<SweepPoint> points() {
  return {{0.0, 0.0, 0.5, 0.5, 0.9}, {1.0, 0.25, 0.5, 0.25, 0.8}, {2.0, 0.125, 0.5, -0.375, 0.6}};
}

}  // namespace

TEST(PlotKind, Names) {
  for (auto k : {PlotKind::kLayerEffectiveness, PlotKind::kAlphaSweep, PlotKind::kSimilarityProfile,
                 PlotKind::kQualityTradeoff}) {
    EXPECT_EQ(parse_plot_kind(to_string(k)), k);
  }
  EXPECT_THROW(parse_plot_kind("histogram"), ConfigError);
}

TEST(PlotTsv, AlphaSweepExact) {
  EXPECT_EQ(render_plot_tsv(alpha_sweep_table(points())),
            "# alpha_sweep\n"
            "alpha\tdelta_bias\tbias_before\tbias_after\tquality_after\n"
            "0.0\t0.0\t0.5\t0.5\t0.9\n"
            "1.0\t0.25\t0.5\t0.25\t0.8\n"
            "2.0\t0.125\t0.5\t-0.375\t0.6\n");
}

TEST(PlotTsv, OtherTables) {
  EXPECT_EQ(render_plot_tsv(layer_effectiveness_table({{8, 0.1, 0.9}, {12, -0.5, 1.0}})),
            "# layer_effectiveness\nlayer\tdelta_bias\tquality_after\n8.0\t0.1\t0.9\n12.0\t-0.5\t1.0\n");
  EXPECT_EQ(render_plot_tsv(similarity_profile_table({{1, 0.5}})),
            "# similarity_profile\nlayer\tcosine\n1.0\t0.5\n");
  EXPECT_EQ(render_plot_tsv(quality_tradeoff_table(points())),
            "# quality_tradeoff\ndelta_bias\tquality_after\talpha\n"
            "0.0\t0.9\t0.0\n0.25\t0.8\t1.0\n0.125\t0.6\t2.0\n");
}

TEST(PlotTsv, NumbersRoundTrip) {
  const double x = 0.1 + 0.2, y = -1.0 / 3.0;
  const std::string t = render_plot_tsv(similarity_profile_table({{3, x}, {4, y}}));
  const auto row = t.find("3.0\t") + 4;
  double parsed = 0.0;
  std::from_chars(t.data() + row, t.data() + t.size(), parsed);
  EXPECT_EQ(parsed, x);
  const auto row2 = t.find("4.0\t") + 4;
  std::from_chars(t.data() + row2, t.data() + t.size(), parsed);
  EXPECT_EQ(parsed, y);
}

TEST(PlotSvg, Shapes) {
  const std::string line = render_plot_svg(alpha_sweep_table(points()));
  EXPECT_EQ(line.rfind("<svg ", 0), 0u);
  EXPECT_EQ(line.substr(line.size() - 7), "</svg>\n");
  EXPECT_EQ(count(line, "<polyline"), 1u);
  EXPECT_EQ(count(line, "<circle"), 3u);
  const std::string bars = render_plot_svg(layer_effectiveness_table({{1, 0.1, 1}, {2, -0.2, 1}}));
  EXPECT_EQ(count(bars, "<rect"), 3u);  // background + 2 bars
  EXPECT_EQ(count(bars, "<polyline"), 0u);
  // A single point and a flat series still render.
  EXPECT_NO_THROW(render_plot_svg(similarity_profile_table({{1, 0.0}})));
}

TEST(Plot, Errors) {
  EXPECT_THROW(render_plot_tsv(alpha_sweep_table({})), DegenerateInput);
  EXPECT_THROW(render_plot_svg(alpha_sweep_table({})), DegenerateInput);
  PlotTable t = similarity_profile_table({{1, 0.5}});
  t.rows.push_back({1.0});
  EXPECT_THROW(render_plot_tsv(t), ShapeError);
  t = similarity_profile_table({{1, std::nan("")}});
  EXPECT_THROW(render_plot_svg(t), InvalidValue);
  t.columns = {"x"};
  t.rows = {{1.0}};
  EXPECT_THROW(render_plot_tsv(t), ShapeError);
}

TEST(Plot, EmitWritesBothFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "steerkit_plot_test";
  std::filesystem::remove_all(dir);
  const auto table = alpha_sweep_table(points());
  const PlotFiles f = emit_plot_data(table, dir / "sweep");
  EXPECT_EQ(f.data, dir / "sweep.tsv");
  EXPECT_EQ(f.svg, dir / "sweep.svg");
  EXPECT_EQ(io::read_file_text(f.data), render_plot_tsv(table));
  EXPECT_EQ(io::read_file_text(f.svg), render_plot_svg(table));
  EXPECT_THROW(emit_plot_data(alpha_sweep_table({}), dir / "empty"), DegenerateInput);
  EXPECT_FALSE(std::filesystem::exists(dir / "empty.tsv"));
  std::filesystem::remove_all(dir);
}
