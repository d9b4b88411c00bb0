#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

namespace smt_analogy {

/// Binary PGM (P5, maxval 255) bytes; one row per base node, pixel value
/// round(255 * score). Throws std::invalid_argument if a score is outside [0, 1].
std::string encode_pgm(const Eigen::MatrixXd& scores);

/// Writes encode_pgm(scores) to `path`. Throws std::runtime_error on IO failure.
void export_heatmap(const Eigen::MatrixXd& scores, const std::filesystem::path& path);

}  // namespace smt_analogy
