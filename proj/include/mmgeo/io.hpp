#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "mmgeo/entropy_flow.hpp"
#include "mmgeo/space.hpp"

namespace mmgeo::io {

/// JSON space format:
///   {"n": int,
///    "dist": [[...]] | {"points": [[...]], "metric": "euclidean"|"circle",
///             "circumference": number (circle only, default 1)},
///    "mass": [...], "base": int}
/// Distances from coordinates are computed at load time; the matrix form
/// round-trips bit-stably.
FinitePmmSpace load_space(const std::string& path);
FinitePmmSpace space_from_json(const std::string& text);
std::string space_to_json(const FinitePmmSpace& space);
void save_space(const FinitePmmSpace& space, const std::string& path);

/// Mass vector files: JSON array or newline-separated numbers.
Eigen::VectorXd load_vector(const std::string& path);

/// Shortest-roundtrip decimal for doubles; used everywhere output must be
/// byte-stable under reruns.
std::string format_double(double v);

/// FlowTrace CSV: header + one row per state
/// (time, entropy, speed, fisher, residual).
std::string trace_to_csv(const flow::FlowTrace& trace, const std::vector<double>& residuals);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace mmgeo::io
