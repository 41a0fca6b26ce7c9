#include "support.hpp"
#include "wbary/network.hpp"

#include <sstream>

using namespace wbary;

TEST_CASE("generated topologies") {
  const auto cycle = generate_graph(GraphKind::Cycle, 5);
  for (Index i = 0; i < 5; ++i) CHECK(cycle.degree(i) == 2);
  CHECK(degree_extremes(cycle) == std::pair<Index, Index>{2, 2});

  const auto complete = generate_graph(GraphKind::Complete, 4);
  CHECK(complete.edge_count() == 6);
  for (Index i = 0; i < 4; ++i) CHECK(complete.degree(i) == 3);

  CHECK(degree_extremes(generate_graph(GraphKind::Star, 10)) == std::pair<Index, Index>{9, 1});
  CHECK(degree_extremes(generate_graph(GraphKind::Cycle, 7)) == std::pair<Index, Index>{2, 2});
  CHECK(degree_extremes(generate_graph(GraphKind::Complete, 50)) == std::pair<Index, Index>{49, 49});

  const auto single = generate_graph(GraphKind::Complete, 1);
  CHECK(single.edge_count() == 0);
  CHECK(degree_extremes(single) == std::pair<Index, Index>{0, 0});
}

TEST_CASE("erdos_renyi draws are connected and reproducible") {
  const auto g = generate_graph(GraphKind::ErdosRenyi, 1000, 4.0 / 1000.0, 2018);
  CHECK(is_connected(g.size(), g.edges()));
  const auto again = generate_graph(GraphKind::ErdosRenyi, 1000, 4.0 / 1000.0, 2018);
  CHECK(g.edges() == again.edges());
  CHECK(g.resamples() == again.resamples());
  CHECK(g.bridges() == again.bridges());
  CHECK(g.bridges() > 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = generate_graph(GraphKind::ErdosRenyi, 30, 0.1, seed);
    CHECK(is_connected(h.size(), h.edges()));
    CHECK(h.bridges() == 0);
  }

  CHECK_ERROR_CODE(generate_graph(GraphKind::ErdosRenyi, 10), ErrorCode::InvalidParameter);
  CHECK_ERROR_CODE(generate_graph(GraphKind::ErdosRenyi, 10, 0.0), ErrorCode::InvalidParameter);
  CHECK_ERROR_CODE(generate_graph(GraphKind::Star, 10, 0.5), ErrorCode::InvalidParameter);
  CHECK_ERROR_CODE(generate_graph(GraphKind::Star, 0), ErrorCode::InvalidParameter);
}

TEST_CASE("from_edges validation") {
  CHECK_ERROR_CODE(NetworkGraph::from_edges(3, {{0, 0}, {1, 2}}), ErrorCode::InvalidParameter);
  CHECK_ERROR_CODE(NetworkGraph::from_edges(3, {{0, 1}}), ErrorCode::InvalidParameter);
  CHECK_ERROR_CODE(NetworkGraph::from_edges(3, {{0, 3}, {1, 2}}), ErrorCode::InvalidParameter);
  const auto g = NetworkGraph::from_edges(3, {{1, 0}, {0, 1}, {2, 1}});
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(2, 1));
  CHECK_FALSE(g.has_edge(0, 2));
}

TEST_CASE("laplacian") {
  Eigen::Matrix3d expected;
  expected << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  CHECK(laplacian(generate_graph(GraphKind::Complete, 3)).dense() == expected);

  const auto star = laplacian(generate_graph(GraphKind::Star, 4));
  CHECK(star.dense().diagonal() == Eigen::Vector4d(3, 1, 1, 1));
  CHECK(star.d_max == 3);
  CHECK(star.d_min == 1);

  testing::Rng rng(1);
  for (auto kind : {GraphKind::Star, GraphKind::Cycle, GraphKind::Complete, GraphKind::Path}) {
    const auto lap = laplacian(generate_graph(kind, 9));
    const Eigen::MatrixXd d = lap.dense();
    CHECK((d * Eigen::VectorXd::Ones(9)).isZero(0.0));
    CHECK(d == d.transpose());
    for (int t = 0; t < 100; ++t) {
      const Eigen::VectorXd v = testing::random_vector(rng, 9, -1, 1);
      CHECK(v.dot(d * v) >= -1e-12);
    }
  }
}

TEST_CASE("consensus_norm") {
  const auto path2 = laplacian(generate_graph(GraphKind::Path, 2));
  Eigen::Matrix2d blocks;
  blocks << 1, 0, 0, 1;
  CHECK(consensus_norm(blocks, path2) == doctest::Approx(std::sqrt(2.0)));
  CHECK(consensus_norm_stacked(Eigen::Vector4d(1, 0, 0, 1), path2) == doctest::Approx(std::sqrt(2.0)));

  const auto lap = laplacian(generate_graph(GraphKind::Complete, 4));
  Eigen::MatrixXd same = Eigen::VectorXd::LinSpaced(3, 0.1, 0.5).replicate(1, 4);
  CHECK(consensus_norm(same, lap) == 0.0);

  CHECK_ERROR_CODE(consensus_norm_stacked(Eigen::VectorXd::Zero(7), lap), ErrorCode::DimensionMismatch);

  SUBCASE("agrees with an explicit sqrt(Lap (x) I_n)") {
    testing::Rng rng(3);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto g = generate_graph(GraphKind::ErdosRenyi, 7, 0.4, seed);
      const auto l = laplacian(g);
      const Index n = 4;
      const Eigen::MatrixXd p = Eigen::MatrixXd::NullaryExpr(n, 7, [&] { return testing::uniform(rng, 0, 1); });

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l.dense());
      const Eigen::MatrixXd root =
          es.eigenvectors() * es.eigenvalues().cwiseMax(0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
      Eigen::MatrixXd lifted = Eigen::MatrixXd::Zero(7 * n, 7 * n);
      for (Index i = 0; i < 7; ++i)
        for (Index j = 0; j < 7; ++j) lifted.block(i * n, j * n, n, n) = root(i, j) * Eigen::MatrixXd::Identity(n, n);
      const Eigen::VectorXd stacked = Eigen::Map<const Eigen::VectorXd>(p.data(), 7 * n);

      const double expected = (lifted * stacked).norm();
      CHECK(std::abs(consensus_norm(p, l) - expected) < 1e-10);
      CHECK(std::abs(consensus_norm(p, l) * consensus_norm(p, l) - laplacian_quadratic_form(p, l)) < 1e-10);
    }
  }
}

TEST_CASE("smoothness_constant") {
  CHECK(smoothness_constant(laplacian(generate_graph(GraphKind::Complete, 5)), 1.0) == 4.0);
  CHECK(smoothness_constant(laplacian(generate_graph(GraphKind::Star, 4)), 0.1) == doctest::Approx(30.0));
  CHECK(smoothness_constant(laplacian(generate_graph(GraphKind::Cycle, 6)), 0.1) == doctest::Approx(20.0));
  CHECK_ERROR_CODE(smoothness_constant(laplacian(generate_graph(GraphKind::Cycle, 6)), 0.0),
                   ErrorCode::NonPositiveGamma);
}

TEST_CASE("edge list round trip") {
  const auto g = generate_graph(GraphKind::ErdosRenyi, 12, 0.3, 5);
  std::stringstream buf;
  write_edge_list(g, buf);
  const auto back = read_edge_list(buf);
  CHECK(back.size() == 12);
  CHECK(back.edges() == g.edges());

  std::stringstream text("3\n0 1\n1 2\n");
  CHECK(read_edge_list(text).edge_count() == 2);
  std::stringstream bad("3\n0 x\n");
  CHECK_ERROR_CODE(read_edge_list(bad), ErrorCode::IoError);
}
