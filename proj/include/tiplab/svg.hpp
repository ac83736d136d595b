// SPDX-License-Identifier: Apache-2.0
#pragma once

// Minimal static SVG line plots for the CLI's figure output.

#include <filesystem>
#include <string>
#include <vector>

namespace tiplab::svg {

struct Series {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    double width = 1.5;
    bool dashed = false;
    bool points_only = false;
    double point_radius = 2.5;
    std::string label;
};

class Plot {
public:
    Plot(std::string title, std::string xlabel, std::string ylabel,
         int width = 720, int height = 480);

    void add(Series series);
    void set_xlim(double lo, double hi);
    void set_ylim(double lo, double hi);
    void write(const std::filesystem::path& path) const;

private:
    std::string title_, xlabel_, ylabel_;
    int w_, h_;
    std::vector<Series> series_;
    bool has_xlim_ = false, has_ylim_ = false;
    double xlo_ = 0, xhi_ = 1, ylo_ = 0, yhi_ = 1;
};

} // namespace tiplab::svg
