#include "support.hpp"
#include "wbary/io.hpp"

#include <sstream>

using namespace wbary;

namespace {

std::string be32(std::uint32_t v) {
  return {char(v >> 24), char((v >> 16) & 0xff), char((v >> 8) & 0xff), char(v & 0xff)};
}

}  // namespace

TEST_CASE("idx: hand-built file") {
  std::string bytes = be32(0x803) + be32(1) + be32(2) + be32(2);
  bytes += std::string{char(0), char(255), char(128), char(64)};
  std::istringstream in(bytes);
  const auto images = read_idx(in);
  REQUIRE(images.size() == 1);
  Eigen::Matrix2d want;
  want << 0, 255, 128, 64;
  CHECK(images[0] == want);

  std::ostringstream out;
  write_idx(images, out);
  CHECK(out.str() == bytes);
}

TEST_CASE("idx: errors") {
  std::istringstream labels(be32(0x801) + be32(1) + be32(2) + be32(2) + std::string(4, '\0'));
  CHECK_ERROR_CODE(read_idx(labels), ErrorCode::BadMagic);

  std::istringstream short_payload(be32(0x803) + be32(10) + be32(2) + be32(2) + std::string(9 * 4, '\1'));
  CHECK_ERROR_CODE(read_idx(short_payload), ErrorCode::TruncatedFile);

  std::istringstream short_header(be32(0x803) + be32(1));
  CHECK_ERROR_CODE(read_idx(short_header), ErrorCode::TruncatedFile);

  CHECK_ERROR_CODE(load_idx("/nonexistent/file.idx"), ErrorCode::IoError);
}

TEST_CASE("idx: file round trip with labels") {
  const auto dir = std::filesystem::temp_directory_path() / "wbary_test_io";
  std::filesystem::create_directories(dir);
  std::vector<Eigen::MatrixXd> images;
  for (int k = 0; k < 3; ++k) images.push_back(Eigen::MatrixXd::Constant(4, 5, 10.0 * k));
  save_idx(images, dir / "img.idx");
  save_idx_labels({7, 1, 9}, dir / "lab.idx");
  CHECK(load_idx(dir / "img.idx") == images);
  CHECK(load_idx_labels(dir / "lab.idx") == std::vector<std::uint8_t>{7, 1, 9});
  CHECK_ERROR_CODE(load_idx_labels(dir / "img.idx"), ErrorCode::BadMagic);
  CHECK_ERROR_CODE(load_idx(dir / "lab.idx"), ErrorCode::BadMagic);
}

TEST_CASE("preprocess_image") {
  Eigen::MatrixXd img(28, 28);
  for (Index r = 0; r < 28; ++r)
    for (Index c = 0; c < 28; ++c) img(r, c) = double((r * 28 + c) % 256);

  const auto same = preprocess_image(img, 1.0, {0, 0});
  CHECK(same.rows() == 56);
  CHECK(same.block(0, 0, 28, 28) == img);
  CHECK(same.block(28, 0, 28, 56).isZero(0.0));
  CHECK(same.block(0, 28, 28, 28).isZero(0.0));

  const auto full = preprocess_image(img, 2.0, {0, 0});
  CHECK(full(0, 0) == img(0, 0));
  CHECK(full(55, 55) == img(27, 27));
  CHECK(full(11, 20) == img(5, 10));
  CHECK_ERROR_CODE(preprocess_image(img, 2.0, {0, 1}), ErrorCode::OutOfCanvas);
  CHECK_ERROR_CODE(preprocess_image(img, 2.0, {3, 0}), ErrorCode::OutOfCanvas);

  const Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(28, 28);
  const auto half = preprocess_image(ones, 0.5, {10, 20});
  CHECK(half.block(10, 20, 14, 14) == Eigen::MatrixXd::Ones(14, 14));
  CHECK(half.sum() == 14.0 * 14.0);

  CHECK_ERROR_CODE(preprocess_image(img, 1.0, {-1, 0}), ErrorCode::OutOfCanvas);
  CHECK_ERROR_CODE(preprocess_image(img, 0.0, {0, 0}), ErrorCode::InvalidParameter);
  CHECK(preprocess_image(img, 1.0, {0, 0}, 28, 28) == img);
}

TEST_CASE("pgm") {
  const auto grid = SupportGrid<double>::lattice(2, 2);

  std::ostringstream uniform;
  write_pgm(DiscreteDistribution<double>(Eigen::Vector4d::Constant(0.25)), grid, uniform);
  CHECK(uniform.str() == std::string("P5\n2 2\n255\n") + std::string(4, char(255)));

  std::ostringstream point;
  write_pgm(DiscreteDistribution<double>(Eigen::Vector4d(0, 0, 1, 0)), grid, point);
  std::istringstream back(point.str());
  const auto img = read_pgm(back);
  Eigen::Matrix2d want;
  want << 0, 0, 255, 0;
  CHECK(img == want);

  testing::Rng rng(31);
  const auto lattice = SupportGrid<double>::lattice(7, 9);
  for (int t = 0; t < 10; ++t) {
    const auto d = testing::random_simplex(rng, 63);
    std::stringstream io;
    write_pgm(d, lattice, io);
    const auto pic = read_pgm(io);
    REQUIRE(pic.rows() == 7);
    REQUIRE(pic.cols() == 9);
    Index arg = 0;
    d.weights().maxCoeff(&arg);
    CHECK(pic(arg / 9, arg % 9) == 255.0);
  }

  std::ostringstream sink;
  CHECK_ERROR_CODE(write_pgm(DiscreteDistribution<double>(Eigen::Vector3d::Constant(1.0 / 3)),
                             SupportGrid<double>::equispaced(0, 1, 3), sink),
                   ErrorCode::NonRectangularGrid);
  std::istringstream bad("P2\n1 1\n255\n");
  CHECK_ERROR_CODE(read_pgm(bad), ErrorCode::BadMagic);
}

TEST_CASE("weights csv") {
  std::ostringstream out;
  write_weights_csv(DiscreteDistribution<double>(Eigen::Vector2d(0.25, 0.75)), out);
  CHECK(out.str() == "index,weight\n0,0.25\n1,0.75\n");
}
