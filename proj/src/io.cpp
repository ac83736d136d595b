// SPDX-License-Identifier: Apache-2.0

#include "tiplab/io.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace tiplab::io {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column mismatch");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t c = 0; c < header.size(); ++c)
        out << header[c] << (c + 1 < header.size() ? ',' : '\n');
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns)
        if (col->size() != rows)
            throw std::invalid_argument("write_csv: ragged columns");
    for (std::size_t rix = 0; rix < rows; ++rix) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << format_g17((*columns[c])[rix])
                << (c + 1 < columns.size() ? ',' : '\n');
    }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory<PhasePoint2>& traj) {
    std::vector<double> xs, ys;
    xs.reserve(traj.size());
    ys.reserve(traj.size());
    for (const auto& s : traj.state) {
        xs.push_back(s.x);
        ys.push_back(s.y);
    }
    write_csv(path, {"t", "x", "y"}, {&traj.t, &xs, &ys});
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory<PhasePoint3>& traj) {
    std::vector<double> xs, ps, ys;
    for (const auto& s : traj.state) {
        xs.push_back(s.x);
        ps.push_back(s.p);
        ys.push_back(s.y);
    }
    write_csv(path, {"t", "x", "p", "y"}, {&traj.t, &xs, &ps, &ys});
}

void write_section_curve_csv(const std::filesystem::path& path,
                             const SectionCurve& curve) {
    std::vector<double> ys, ps, xs;
    for (const auto& n : curve.nodes) {
        ys.push_back(n.y);
        ps.push_back(n.p);
        xs.push_back(n.point.x);
    }
    write_csv(path, {"y", "p", "x"}, {&ys, &ps, &xs});
}

void write_mode_path_csv(const std::filesystem::path& path, const ModePath& mp) {
    write_csv(path, {"t", "y", "x_mode"}, {&mp.t, &mp.y, &mp.x_mode});
}

void write_first_passage_csv(const std::filesystem::path& path,
                             const EnsembleResult& ensemble) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "stream_id,t_cross\n";
    for (int i = 0; i < ensemble.n; ++i) {
        if (ensemble.outcome[i] != RealizationOutcome::tipped) continue;
        out << (ensemble.config.stream_offset + (std::uint64_t)i) << ','
            << format_g17(ensemble.first_passage[i]) << '\n';
    }
}

} // namespace tiplab::io
