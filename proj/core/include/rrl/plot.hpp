#pragma once

#include "rrl/regret.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace rrl {

enum class PlotKind { Regret, Epsilon };

PlotKind parse_plot_kind(std::string_view name);

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Data-space extents the axes were drawn with.
struct PlotFrame {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

/// Regret: cumulative mean with its band per episode. Epsilon: mean / K' (and band / K')
/// on a log-spaced subset of episodes.
PlotSeries series_from_aggregate(std::span<const AggregateRow> rows, PlotKind kind, std::string label);

/// Axis ranges spanning exactly [min x, max x] and [min lower, max upper] over all series.
PlotFrame plot_frame(std::span<const PlotSeries> series);

/// Static SVG: one polyline and one shaded band polygon per series. Throws on empty input.
std::string render_svg(std::span<const PlotSeries> series, PlotKind kind);

/// Reads aggregate CSVs and writes the SVG; nothing is written if any input is malformed or empty.
PlotFrame emit_plot(std::span<const std::filesystem::path> aggregate_csvs, PlotKind kind,
                    const std::filesystem::path& out);

}  // namespace rrl
