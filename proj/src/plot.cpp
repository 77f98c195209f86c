#include "crvpinn/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

namespace crvpinn {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 80, kRight = 180, kTop = 40, kBottom = 60;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_log_plot(std::span<const PlotSeries> series, const std::string& title,
                            const std::string& x_label) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!(s.y[k] > 0.0) || !std::isfinite(s.y[k])) continue;
            xmin = std::min(xmin, s.x[k]);
            xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]);
            ymax = std::max(ymax, s.y[k]);
        }
    }
    if (!std::isfinite(xmin)) {
        xmin = 0;
        xmax = 1;
        ymin = 1;
        ymax = 10;
    }
    if (xmax == xmin) xmax = xmin + 1;
    const double lo = std::floor(std::log10(ymin));
    double hi = std::ceil(std::log10(ymax));
    if (hi == lo) hi = lo + 1;

    const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return kTop + (hi - std::log10(y)) / (hi - lo) * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight);
    svg += fmt::format("<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                       kLeft + pw / 2, escape(title));
    svg += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n", kLeft, kTop,
        pw, ph);
    for (int e = static_cast<int>(lo); e <= static_cast<int>(hi); ++e) {
        const double y = py(std::pow(10.0, e));
        svg += fmt::format("<line x1=\"{}\" y1=\"{:.2f}\" x2=\"{}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y,
                           kLeft + pw, y);
        svg += fmt::format("<text x=\"{}\" y=\"{:.2f}\" text-anchor=\"end\">1e{}</text>\n", kLeft - 6, y + 4, e);
    }
    for (int t = 0; t <= 4; ++t) {
        const double xv = xmin + (xmax - xmin) * t / 4.0;
        svg += fmt::format("<text x=\"{:.2f}\" y=\"{}\" text-anchor=\"middle\">{:.6g}</text>\n", px(xv),
                           kTop + ph + 18, xv);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2,
                       kHeight - 16, escape(x_label));

    int legend = 0;
    for (const auto& s : series) {
        std::string path;
        for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
            if (!(s.y[k] > 0.0) || !std::isfinite(s.y[k])) continue;
            path += fmt::format("{}{:.2f},{:.2f} ", path.empty() ? "M" : "L", px(s.x[k]), py(s.y[k]));
        }
        if (path.empty()) continue;
        svg += fmt::format("<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>\n", path, s.color);
        const double ly = kTop + 10 + 18 * legend++;
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           kLeft + pw + 12, ly, kLeft + pw + 36, ly, s.color);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", kLeft + pw + 42, ly + 4, escape(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

std::string render_convergence_svg(std::span<const TrainingRecord> records, const std::string& title) {
    PlotSeries loss{"sqrt(loss)", "#1f77b4", {}, {}};
    PlotSeries disc{"err vs u*_h", "#d62728", {}, {}};
    PlotSeries anal{"err vs exact", "#2ca02c", {}, {}};
    PlotSeries lower{"lower bound", "#9467bd", {}, {}};
    PlotSeries upper{"upper bound", "#8c564b", {}, {}};
    for (const auto& r : records) {
        const double it = static_cast<double>(r.iteration);
        loss.x.push_back(it);
        loss.y.push_back(r.sqrt_loss);
        disc.x.push_back(it);
        disc.y.push_back(r.err_discrete);
        anal.x.push_back(it);
        anal.y.push_back(r.err_analytic);
        if (r.lower_bound && r.upper_bound) {
            lower.x.push_back(it);
            lower.y.push_back(*r.lower_bound);
            upper.x.push_back(it);
            upper.y.push_back(*r.upper_bound);
        }
    }
    std::vector<PlotSeries> all = {loss, disc, anal};
    if (!lower.x.empty()) {
        all.push_back(lower);
        all.push_back(upper);
    }
    return render_log_plot(all, title, "iteration");
}

void write_convergence_svg(const std::filesystem::path& path, std::span<const TrainingRecord> records,
                           const std::string& title) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << render_convergence_svg(records, title);
}

}  // namespace crvpinn
