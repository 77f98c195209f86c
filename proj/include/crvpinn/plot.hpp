#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "crvpinn/trainer.hpp"

namespace crvpinn {

struct PlotSeries {
    std::string label;
    std::string color;
    std::vector<double> x;
    std::vector<double> y;
};

/// Static SVG line chart with a log-scale y axis. Non-positive values are skipped.
std::string render_log_plot(std::span<const PlotSeries> series, const std::string& title,
                            const std::string& x_label);

/// sqrt(loss), err_discrete, err_analytic and the bounds against iteration.
std::string render_convergence_svg(std::span<const TrainingRecord> records, const std::string& title);
void write_convergence_svg(const std::filesystem::path& path, std::span<const TrainingRecord> records,
                           const std::string& title);

}  // namespace crvpinn
