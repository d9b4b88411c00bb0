#include "smt_analogy/heatmap.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace smt_analogy {

std::string encode_pgm(const Eigen::MatrixXd& scores) {
  std::string out = "P5\n" + std::to_string(scores.cols()) + " " + std::to_string(scores.rows()) + "\n255\n";
  out.reserve(out.size() + static_cast<std::size_t>(scores.size()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r)
    for (Eigen::Index c = 0; c < scores.cols(); ++c) {
      const double s = scores(r, c);
      if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("encode_pgm: score outside [0, 1]");
      out.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
    }
  return out;
}

void export_heatmap(const Eigen::MatrixXd& scores, const std::filesystem::path& path) {
  const std::string bytes = encode_pgm(scores);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("export_heatmap: cannot open " + path.string());
  file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!file) throw std::runtime_error("export_heatmap: write failed for " + path.string());
}

}  // namespace smt_analogy
