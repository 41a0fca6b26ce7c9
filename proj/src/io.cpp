#include "wbary/io.hpp"
#include "wbary/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace wbary {

namespace {

std::uint32_t read_be32(std::istream& in, const char* what) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4))
    throw Error(ErrorCode::TruncatedFile, std::string("missing ") + what);
  return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<char, 4> b{char((v >> 24) & 0xff), char((v >> 16) & 0xff), char((v >> 8) & 0xff), char(v & 0xff)};
  out.write(b.data(), 4);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

std::vector<Eigen::MatrixXd> read_idx(std::istream& in) {
  const std::uint32_t magic = read_be32(in, "magic");
  if (magic != kIdxImageMagic) throw Error(ErrorCode::BadMagic, "not an IDX image file");
  const std::uint32_t count = read_be32(in, "image count");
  const std::uint32_t rows = read_be32(in, "row count");
  const std::uint32_t cols = read_be32(in, "column count");

  std::vector<Eigen::MatrixXd> images;
  images.reserve(count);
  std::vector<unsigned char> buf(std::size_t(rows) * cols);
  for (std::uint32_t k = 0; k < count; ++k) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(buf.size())))
      throw Error(ErrorCode::TruncatedFile,
                  "header promises " + std::to_string(count) + " images, payload ends in image " + std::to_string(k));
    Eigen::MatrixXd img(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r)
      for (std::uint32_t c = 0; c < cols; ++c) img(r, c) = double(buf[std::size_t(r) * cols + c]);
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<Eigen::MatrixXd> load_idx(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_idx(in);
}

void write_idx(const std::vector<Eigen::MatrixXd>& images, std::ostream& out) {
  const auto rows = images.empty() ? 0 : images.front().rows();
  const auto cols = images.empty() ? 0 : images.front().cols();
  write_be32(out, kIdxImageMagic);
  write_be32(out, std::uint32_t(images.size()));
  write_be32(out, std::uint32_t(rows));
  write_be32(out, std::uint32_t(cols));
  for (const auto& img : images) {
    require_dims(img.rows() == rows && img.cols() == cols, "idx images must share one shape");
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) out.put(char(std::clamp(std::lround(img(r, c)), 0L, 255L)));
  }
}

void save_idx(const std::vector<Eigen::MatrixXd>& images, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_idx(images, out);
}

std::vector<std::uint8_t> load_idx_labels(const std::filesystem::path& path) {
  auto in = open_in(path);
  if (read_be32(in, "magic") != kIdxLabelMagic) throw Error(ErrorCode::BadMagic, "not an IDX label file");
  const std::uint32_t count = read_be32(in, "label count");
  std::vector<std::uint8_t> labels(count);
  if (!in.read(reinterpret_cast<char*>(labels.data()), std::streamsize(count)))
    throw Error(ErrorCode::TruncatedFile, "label payload shorter than header");
  return labels;
}

void save_idx_labels(const std::vector<std::uint8_t>& labels, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_be32(out, kIdxLabelMagic);
  write_be32(out, std::uint32_t(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), std::streamsize(labels.size()));
}

Eigen::MatrixXd preprocess_image(const Eigen::MatrixXd& img, double scale, PixelOffset offset, Index canvas_rows,
                                 Index canvas_cols) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidParameter, "scale must be positive");
  const Index rows = std::max<Index>(1, std::lround(double(img.rows()) * scale));
  const Index cols = std::max<Index>(1, std::lround(double(img.cols()) * scale));
  if (offset.row < 0 || offset.col < 0 || offset.row + rows > canvas_rows || offset.col + cols > canvas_cols)
    throw Error(ErrorCode::OutOfCanvas, "scaled image " + std::to_string(rows) + "x" + std::to_string(cols) +
                                            " does not fit the canvas at the requested offset");
  Eigen::MatrixXd canvas = Eigen::MatrixXd::Zero(canvas_rows, canvas_cols);
  for (Index r = 0; r < rows; ++r) {
    const Index sr = std::min<Index>(img.rows() - 1, Index(std::floor(double(r) / scale)));
    for (Index c = 0; c < cols; ++c) {
      const Index sc = std::min<Index>(img.cols() - 1, Index(std::floor(double(c) / scale)));
      canvas(offset.row + r, offset.col + c) = img(sr, sc);
    }
  }
  return canvas;
}

void write_pgm(const DiscreteDistribution<double>& dist, const SupportGrid<double>& grid, std::ostream& out) {
  const auto& shape = grid.lattice_shape();
  if (!shape) throw Error(ErrorCode::NonRectangularGrid, "PGM output needs a rectangular lattice support");
  require_dims(dist.size() == grid.size(), "distribution and grid sizes differ");
  const double top = dist.weights().maxCoeff();
  out << "P5\n" << shape->cols << ' ' << shape->rows << "\n255\n";
  for (Index i = 0; i < dist.size(); ++i) {
    const long v = top > 0.0 ? std::lround(255.0 * dist[i] / top) : 0L;
    out.put(char(std::clamp(v, 0L, 255L)));
  }
}

void write_pgm(const DiscreteDistribution<double>& dist, const SupportGrid<double>& grid,
               const std::filesystem::path& path) {
  auto out = open_out(path);
  write_pgm(dist, grid, out);
}

Eigen::MatrixXd read_pgm(std::istream& in) {
  std::string magic;
  Index cols = 0, rows = 0, maxval = 0;
  if (!(in >> magic) || magic != "P5") throw Error(ErrorCode::BadMagic, "not a binary PGM");
  if (!(in >> cols >> rows >> maxval) || maxval != 255) throw Error(ErrorCode::IoError, "bad PGM header");
  in.get();
  Eigen::MatrixXd img(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) {
      const int ch = in.get();
      if (ch == std::char_traits<char>::eof()) throw Error(ErrorCode::TruncatedFile, "PGM payload too short");
      img(r, c) = double(static_cast<unsigned char>(ch));
    }
  return img;
}

Eigen::MatrixXd read_pgm(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_pgm(in);
}

void write_weights_csv(const DiscreteDistribution<double>& dist, std::ostream& out) {
  out << "index,weight\n";
  for (Index i = 0; i < dist.size(); ++i) out << i << ',' << format_double(dist[i]) << '\n';
}

}  // namespace wbary
