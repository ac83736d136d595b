// SPDX-License-Identifier: Apache-2.0

#include "tiplab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tiplab::svg {

Plot::Plot(std::string title, std::string xlabel, std::string ylabel, int width,
           int height)
    : title_(std::move(title)), xlabel_(std::move(xlabel)),
      ylabel_(std::move(ylabel)), w_(width), h_(height) {}

void Plot::add(Series series) { series_.push_back(std::move(series)); }

void Plot::set_xlim(double lo, double hi) {
    has_xlim_ = true;
    xlo_ = lo;
    xhi_ = hi;
}

void Plot::set_ylim(double lo, double hi) {
    has_ylim_ = true;
    ylo_ = lo;
    yhi_ = hi;
}

namespace {

struct Ticks {
    std::vector<double> at;
};

Ticks nice_ticks(double lo, double hi) {
    Ticks t;
    const double span = hi - lo;
    if (!(span > 0.0)) {
        t.at = {lo};
        return t;
    }
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (const double m : {1.0, 2.0, 5.0, 10.0}) {
        if (mag * m >= raw) {
            step = mag * m;
            break;
        }
    }
    const double first = std::ceil(lo / step) * step;
    for (double v = first; v <= hi + 1e-12 * span; v += step)
        t.at.push_back(std::fabs(v) < 1e-12 * span ? 0.0 : v);
    return t;
}

std::string fmt_tick(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

void Plot::write(const std::filesystem::path& path) const {
    double xlo = xlo_, xhi = xhi_, ylo = ylo_, yhi = yhi_;
    if (!has_xlim_ || !has_ylim_) {
        double axlo = std::numeric_limits<double>::infinity(), axhi = -axlo;
        double aylo = axlo, ayhi = -axlo;
        for (const auto& s : series_) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                axlo = std::min(axlo, s.x[i]);
                axhi = std::max(axhi, s.x[i]);
                aylo = std::min(aylo, s.y[i]);
                ayhi = std::max(ayhi, s.y[i]);
            }
        }
        if (!std::isfinite(axlo)) {
            axlo = 0;
            axhi = 1;
            aylo = 0;
            ayhi = 1;
        }
        if (axlo == axhi) {
            axlo -= 0.5;
            axhi += 0.5;
        }
        if (aylo == ayhi) {
            aylo -= 0.5;
            ayhi += 0.5;
        }
        const double mx = 0.04 * (axhi - axlo), my = 0.06 * (ayhi - aylo);
        if (!has_xlim_) {
            xlo = axlo - mx;
            xhi = axhi + mx;
        }
        if (!has_ylim_) {
            ylo = aylo - my;
            yhi = ayhi + my;
        }
    }

    const double ml = 64, mr = 16, mt = 34, mb = 46; // margins
    const double pw = w_ - ml - mr, ph = h_ - mt - mb;
    auto px = [&](double x) { return ml + (x - xlo) / (xhi - xlo) * pw; };
    auto py = [&](double y) { return mt + (yhi - y) / (yhi - ylo) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_
       << "\" height=\"" << h_ << "\" viewBox=\"0 0 " << w_ << ' ' << h_
       << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << w_ / 2 << "\" y=\"20\" text-anchor=\"middle\" "
          "font-family=\"sans-serif\" font-size=\"14\">"
       << title_ << "</text>\n";

    const Ticks xt = nice_ticks(xlo, xhi), yt = nice_ticks(ylo, yhi);
    os << "<g stroke=\"#cccccc\" stroke-width=\"0.5\">\n";
    for (const double v : xt.at)
        os << "<line x1=\"" << px(v) << "\" y1=\"" << mt << "\" x2=\"" << px(v)
           << "\" y2=\"" << mt + ph << "\"/>\n";
    for (const double v : yt.at)
        os << "<line x1=\"" << ml << "\" y1=\"" << py(v) << "\" x2=\"" << ml + pw
           << "\" y2=\"" << py(v) << "\"/>\n";
    os << "</g>\n";
    os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw
       << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
    for (const double v : xt.at)
        os << "<text x=\"" << px(v) << "\" y=\"" << mt + ph + 16
           << "\" text-anchor=\"middle\">" << fmt_tick(v) << "</text>\n";
    for (const double v : yt.at)
        os << "<text x=\"" << ml - 6 << "\" y=\"" << py(v) + 4
           << "\" text-anchor=\"end\">" << fmt_tick(v) << "</text>\n";
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h_ - 10
       << "\" text-anchor=\"middle\" font-size=\"13\">" << xlabel_
       << "</text>\n";
    os << "<text x=\"16\" y=\"" << mt + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
       << mt + ph / 2 << ")\">" << ylabel_ << "</text>\n";
    os << "</g>\n";

    int legend_row = 0;
    for (const auto& s : series_) {
        if (s.points_only) {
            os << "<g fill=\"" << s.color << "\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
                if (s.x[i] < xlo || s.x[i] > xhi || s.y[i] < ylo || s.y[i] > yhi)
                    continue;
                os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                   << "\" r=\"" << s.point_radius << "\"/>\n";
            }
            os << "</g>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << s.color
               << "\" stroke-width=\"" << s.width << '"';
            if (s.dashed) os << " stroke-dasharray=\"6 4\"";
            os << " points=\"";
            bool pen_up = true;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
                    pen_up = true;
                    continue;
                }
                (void)pen_up;
                pen_up = false;
                os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            os << "\"/>\n";
        }
        if (!s.label.empty()) {
            const double lx = ml + pw - 150, ly = mt + 16 + 16 * legend_row;
            os << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\""
               << lx + 26 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color
               << "\" stroke-width=\"2\"";
            if (s.dashed) os << " stroke-dasharray=\"6 4\"";
            os << "/>\n";
            os << "<text x=\"" << lx + 32 << "\" y=\"" << ly
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label
               << "</text>\n";
            ++legend_row;
        }
    }
    os << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << os.str();
}

} // namespace tiplab::svg
