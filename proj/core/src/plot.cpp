#include "rrl/plot.hpp"

#include "rrl/experiment.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace rrl {

PlotKind parse_plot_kind(std::string_view name) {
    if (name == "regret") return PlotKind::Regret;
    if (name == "epsilon") return PlotKind::Epsilon;
    throw std::invalid_argument("unknown plot kind '" + std::string(name) + "'");
}

PlotSeries series_from_aggregate(std::span<const AggregateRow> rows, PlotKind kind, std::string label) {
    PlotSeries s;
    s.label = std::move(label);
    if (rows.empty()) return s;
    auto push = [&s](const AggregateRow& r, double scale) {
        s.x.push_back(static_cast<double>(r.episode));
        s.y.push_back(r.mean_regret * scale);
        s.lower.push_back(r.ci_lower * scale);
        s.upper.push_back(r.ci_upper * scale);
    };
    if (kind == PlotKind::Regret) {
        for (const auto& r : rows) push(r, 1.0);
        return s;
    }
    for (std::size_t k : log_spaced_checkpoints(rows.size(), 60)) {
        const auto& r = rows[k - 1];
        push(r, 1.0 / static_cast<double>(r.episode));
    }
    return s;
}

PlotFrame plot_frame(std::span<const PlotSeries> series) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    PlotFrame f{inf, -inf, inf, -inf};
    for (const auto& s : series) {
        for (double x : s.x) {
            f.x_min = std::min(f.x_min, x);
            f.x_max = std::max(f.x_max, x);
        }
        for (double y : s.lower) f.y_min = std::min(f.y_min, y);
        for (double y : s.upper) f.y_max = std::max(f.y_max, y);
        for (double y : s.y) {
            f.y_min = std::min(f.y_min, y);
            f.y_max = std::max(f.y_max, y);
        }
    }
    return f;
}

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

std::string num(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

}  // namespace

std::string render_svg(std::span<const PlotSeries> series, PlotKind kind) {
    if (series.empty()) throw std::invalid_argument("plot: no series");
    for (const auto& s : series)
        if (s.x.empty()) throw std::invalid_argument("plot: empty series '" + s.label + "'");

    const PlotFrame f = plot_frame(series);
    const double x_span = f.x_max > f.x_min ? f.x_max - f.x_min : 1.0;
    const double y_span = f.y_max > f.y_min ? f.y_max - f.y_min : 1.0;
    const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - f.x_min) / x_span * plot_w; };
    auto py = [&](double y) { return kTop + plot_h - (y - f.y_min) / y_span * plot_h; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" data-x-min=\"" << num(f.x_min)
        << "\" data-x-max=\"" << num(f.x_max) << "\" data-y-min=\"" << num(f.y_min) << "\" data-y-max=\""
        << num(f.y_max) << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
        << (kind == PlotKind::Regret ? "Cumulative robust regret" : "Average suboptimality of the output policy")
        << "</text>\n";

    // axes and ticks
    svg << "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
        << kTop + plot_h << "\"/>"
        << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
        << "\"/></g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = f.x_min + x_span * i / 5.0, yv = f.y_min + y_span * i / 5.0;
        svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 16 << "\" text-anchor=\"middle\">" << num(xv)
            << "</text>";
        svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << num(yv)
            << "</text>\n";
    }
    svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\">episodes K</text>\n";
    svg << "<text transform=\"translate(16," << kTop + plot_h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
        << (kind == PlotKind::Regret ? "regret" : "epsilon") << "</text>\n</g>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kColors[i % kColors.size()];
        svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j) svg << px(s.x[j]) << ',' << py(s.upper[j]) << ' ';
        for (std::size_t j = s.x.size(); j-- > 0;) svg << px(s.x[j]) << ',' << py(s.lower[j]) << ' ';
        svg << "\"/>\n";
        svg << "<polyline class=\"mean\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j) svg << px(s.x[j]) << ',' << py(s.y[j]) << ' ';
        svg << "\"/>\n";
        svg << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 14 + 14 * static_cast<double>(i)
            << "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">" << s.label << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

PlotFrame emit_plot(std::span<const std::filesystem::path> aggregate_csvs, PlotKind kind,
                    const std::filesystem::path& out) {
    std::vector<PlotSeries> series;
    for (const auto& path : aggregate_csvs) {
        const auto rows = read_aggregate_csv(path);
        if (rows.empty()) throw std::runtime_error(path.string() + ": no data rows");
        const std::string label = path.parent_path().filename().string();
        series.push_back(series_from_aggregate(rows, kind, label.empty() ? path.stem().string() : label));
    }
    const std::string svg = render_svg(series, kind);
    std::ofstream file(out, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + out.string());
    file << svg;
    return plot_frame(series);
}

}  // namespace rrl
