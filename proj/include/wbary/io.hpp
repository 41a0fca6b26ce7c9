#pragma once

#include "wbary/distributions.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace wbary {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// IDX image file: big-endian magic 0x00000803, count, rows, cols, then
/// row-major unsigned bytes. Pixel values are returned as 0..255.
std::vector<Eigen::MatrixXd> read_idx(std::istream& in);
std::vector<Eigen::MatrixXd> load_idx(const std::filesystem::path& path);

/// Writes images with entries rounded and clamped to 0..255.
void write_idx(const std::vector<Eigen::MatrixXd>& images, std::ostream& out);
void save_idx(const std::vector<Eigen::MatrixXd>& images, const std::filesystem::path& path);

/// IDX label file (magic 0x00000801).
std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path);
void save_idx_labels(const std::vector<std::uint8_t>& labels, const std::filesystem::path& path);

struct PixelOffset {
  Index row = 0;
  Index col = 0;
};

/// Nearest-neighbour rescale by `scale`, pasted at `offset` on a zero canvas.
Eigen::MatrixXd preprocess_image(const Eigen::MatrixXd& img, double scale, PixelOffset offset,
                                 Index canvas_rows = 56, Index canvas_cols = 56);

/// Binary PGM (P5, maxval 255). Weights are rescaled so the largest maps to 255.
void write_pgm(const DiscreteDistribution<double>& dist, const SupportGrid<double>& grid, std::ostream& out);
void write_pgm(const DiscreteDistribution<double>& dist, const SupportGrid<double>& grid,
               const std::filesystem::path& path);

Eigen::MatrixXd read_pgm(std::istream& in);
Eigen::MatrixXd read_pgm(const std::filesystem::path& path);

/// "index,weight" rows.
void write_weights_csv(const DiscreteDistribution<double>& dist, std::ostream& out);

}  // namespace wbary
