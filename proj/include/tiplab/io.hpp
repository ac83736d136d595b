// SPDX-License-Identifier: Apache-2.0
#pragma once

// CSV/JSON writers. All floating point goes out with 17 significant digits
// so values round-trip exactly.

#include "tiplab/manifolds.hpp"
#include "tiplab/sde.hpp"
#include "tiplab/stats.hpp"
#include "tiplab/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tiplab::io {

std::string format_g17(double v);

/// columns.size() must match header entries; all columns equal length.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);

void write_text(const std::filesystem::path& path, const std::string& text);

void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory<PhasePoint2>& traj);
void write_trajectory_csv(const std::filesystem::path& path,
                          const Trajectory<PhasePoint3>& traj);
void write_section_curve_csv(const std::filesystem::path& path,
                             const SectionCurve& curve);
void write_mode_path_csv(const std::filesystem::path& path, const ModePath& mp);
void write_first_passage_csv(const std::filesystem::path& path,
                             const EnsembleResult& ensemble);

} // namespace tiplab::io
