#include "support.hpp"
#include "wbary/dfgm.hpp"
#include "wbary/simulator.hpp"

using namespace wbary;
using testing::Rng;

namespace {

std::vector<Distribution> random_q_list(Rng& rng, Index m, Index n) {
  std::vector<Distribution> out;
  for (Index i = 0; i < m; ++i) out.push_back(testing::random_simplex(rng, n));
  return out;
}

std::vector<Distribution> gaussian_q_list(Rng& rng, Index m, const SupportGrid<double>& grid) {
  std::vector<Distribution> out;
  for (Index i = 0; i < m; ++i)
    out.push_back(discretize_truncated_gaussian(testing::uniform(rng, -5, 5), testing::uniform(rng, 0.1, 2), grid));
  return out;
}

/// Straight transcription of the centralized recursion on stacked m*n
/// vectors with an explicit sqrt(Lap) (x) I_n matrix.
std::vector<Eigen::VectorXd> naive_centralized_y_tilde(const std::vector<Distribution>& q_list,
                                                       const NetworkGraph& graph, const Kernel& kernel, Index rounds) {
  const Index m = graph.size(), n = kernel.size();
  const Laplacian lap = laplacian(graph);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap.dense());
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseMax(0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(m * n, m * n);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < m; ++j) big.block(i * n, j * n, n, n) = root(i, j) * Eigen::MatrixXd::Identity(n, n);
  const double L = double(lap.d_max) / kernel.gamma();

  Eigen::VectorXd y = Eigen::VectorXd::Zero(m * n), w = y, z = y;
  std::vector<Eigen::VectorXd> history;
  for (Index k = 0; k < rounds; ++k) {
    const double tau = 2.0 / double(k + 2), alpha = double(k + 2) / (2.0 * L);
    y = tau * z + (1 - tau) * w;
    const Eigen::VectorXd yt = big * y;
    Eigen::VectorXd p(m * n);
    for (Index i = 0; i < m; ++i)
      p.segment(i * n, n) = dual_gradient(yt.segment(i * n, n), q_list[std::size_t(i)], kernel).weights();
    w = y - big * p / L;
    z = z - alpha * big * p;
    history.push_back(yt);
  }
  return history;
}

struct DistributedHistory {
  std::vector<Eigen::MatrixXd> y_tilde;
  RunResult result;
};

DistributedHistory run_with_history(const std::vector<Distribution>& q_list, const NetworkGraph& g, const Kernel& k,
                                    Index rounds) {
  DistributedHistory h;
  RunOptions opts;
  opts.rounds = rounds;
  opts.observer = [&](Index, const std::vector<AgentState>& agents) {
    Eigen::MatrixXd y(k.size(), Index(agents.size()));
    for (std::size_t i = 0; i < agents.size(); ++i) y.col(Index(i)) = agents[i].y_tilde;
    h.y_tilde.push_back(y);
  };
  h.result = run(q_list, g, k, opts);
  return h;
}

double max_history_gap(const std::vector<Eigen::MatrixXd>& a, const std::vector<Eigen::MatrixXd>& b) {
  REQUIRE(a.size() == b.size());
  double gap = 0;
  for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return gap;
}

}  // namespace

TEST_CASE("schedule") {
  auto [tau0, a0] = schedule(0, 10.0);
  CHECK(tau0 == 1.0);
  CHECK(a0 == doctest::Approx(0.1));
  auto [tau2, a2] = schedule(2, 10.0);
  CHECK(tau2 == 0.5);
  CHECK(a2 == doctest::Approx(0.2));
  double prev_tau = 2.0, prev_alpha = 0.0;
  for (Index k = 0; k < 100; ++k) {
    auto [t, a] = schedule(k, 3.0);
    CHECK(t < prev_tau);
    CHECK(t > 0.0);
    CHECK(t <= 1.0);
    CHECK(a > prev_alpha);
    prev_tau = t;
    prev_alpha = a;
  }
  CHECK_ERROR_CODE(schedule(0, 0.0), ErrorCode::InvalidParameter);
}

TEST_CASE("agent_round") {
  Rng rng(1);
  const auto k = testing::random_kernel(rng, 4, 0.5);
  const auto q = testing::random_simplex(rng, 4);

  SUBCASE("isolated node never moves") {
    const auto lap = laplacian(generate_graph(GraphKind::Complete, 1));
    const auto row = laplacian_row(lap, 0);
    auto s = AgentState::initial(0, q);
    for (Index r = 0; r < 5; ++r) {
      const StepSchedule sched{1.0 / k.gamma(), r};
      const auto own = dual_gradient(query_point(s, sched), q, k).weights();
      CHECK(own.isApprox(dual_gradient(Eigen::VectorXd::Zero(4), q, k).weights()));
      s = agent_round(s, {}, own, row, sched);
      CHECK(s.w_tilde.isZero(0.0));
      CHECK(s.z_tilde.isZero(0.0));
      CHECK(s.y_tilde.isZero(0.0));
    }
  }

  SUBCASE("identical inputs on a complete graph stay at zero") {
    const auto g = generate_graph(GraphKind::Complete, 3);
    const auto lap = laplacian(g);
    const StepSchedule sched{smoothness_constant(lap, k.gamma()), 0};
    const auto own = dual_gradient(Eigen::VectorXd::Zero(4), q, k).weights();
    auto s = agent_round(AgentState::initial(0, q), {{1, own}, {2, own}}, own, laplacian_row(lap, 0), sched);
    CHECK(s.w_tilde.isZero(1e-15));
    CHECK(s.z_tilde.isZero(1e-15));
  }

  SUBCASE("message errors") {
    const auto lap = laplacian(generate_graph(GraphKind::Path, 3));
    const StepSchedule sched{smoothness_constant(lap, k.gamma()), 0};
    const Eigen::VectorXd own = q.weights();
    CHECK_ERROR_CODE(agent_round(AgentState::initial(1, q), {{0, own}}, own, laplacian_row(lap, 1), sched),
                     ErrorCode::MissingNeighborMessage);
    CHECK_ERROR_CODE(agent_round(AgentState::initial(0, q), {{1, own}, {2, own}}, own, laplacian_row(lap, 0), sched),
                     ErrorCode::TopologyViolation);
  }
}

TEST_CASE("ergodic weights") {
  CHECK(ergodic_weights(1) == std::vector<double>{1.0});
  const auto w3 = ergodic_weights(3);
  CHECK(w3[0] == doctest::Approx(2.0 / 9.0));
  CHECK(w3[1] == doctest::Approx(1.0 / 3.0));
  CHECK(w3[2] == doctest::Approx(4.0 / 9.0));

  for (Index N : {1, 2, 7, 100, 12345, 1000000}) {
    const auto w = ergodic_weights(N);
    double sum = 0.0, carry = 0.0;
    for (double x : w) {
      CHECK(x >= 0.0);
      const double yv = x - carry;
      const double t = sum + yv;
      carry = (t - sum) - yv;
      sum = t;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-14);
  }

  const Eigen::Vector3d bar(0.2, 0.3, 0.5);
  CHECK(ergodic_average(std::vector<Eigen::VectorXd>(17, bar)).isApprox(bar, 1e-14));
  CHECK_ERROR_CODE(ergodic_weights(0), ErrorCode::InvalidParameter);
}

TEST_CASE("run: degenerate instances") {
  Rng rng(2);
  const auto k = testing::random_kernel(rng, 5, 0.3);

  SUBCASE("single agent returns its own regularized projection") {
    const auto q = testing::random_simplex(rng, 5);
    const auto res = run({q}, generate_graph(GraphKind::Complete, 1), k, 25);
    CHECK((res.p_star.col(0) - dual_gradient(Eigen::VectorXd::Zero(5), q, k).weights()).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("identical inputs keep consensus at zero every round") {
    const auto q = testing::random_simplex(rng, 5);
    const auto res = run(std::vector<Distribution>(4, q), generate_graph(GraphKind::Complete, 4), k, 30);
    for (const auto& r : res.trace.rounds) CHECK(r.consensus_norm == 0.0);
  }
}

TEST_CASE("distributed iterates equal the centralized recursion under y~ = sqrt(W) y^") {
  Rng rng(3);

  SUBCASE("three-node path, two rounds") {
    const auto g = generate_graph(GraphKind::Path, 3);
    const auto k = testing::random_kernel(rng, 4, 0.5);
    const auto q = random_q_list(rng, 3, 4);
    const auto d = run_with_history(q, g, k, 2);
    const auto c = centralized_fgm(q, g, k, 2);
    CHECK(max_history_gap(d.y_tilde, c.y_tilde_history) < 1e-10);
  }
  SUBCASE("two-node path, ten rounds, primal sequences") {
    const auto g = generate_graph(GraphKind::Path, 2);
    const auto k = testing::random_kernel(rng, 2, 0.5);
    const auto q = random_q_list(rng, 2, 2);
    const auto d = run_with_history(q, g, k, 10);
    const auto c = centralized_fgm(q, g, k, 10);
    CHECK(max_history_gap(d.y_tilde, c.y_tilde_history) < 1e-10);
    for (std::size_t r = 0; r < d.y_tilde.size(); ++r)
      for (Index i = 0; i < 2; ++i) {
        const auto pd = dual_gradient(d.y_tilde[r].col(i), q[std::size_t(i)], k).weights();
        const auto pc = dual_gradient(c.y_tilde_history[r].col(i), q[std::size_t(i)], k).weights();
        CHECK((pd - pc).cwiseAbs().maxCoeff() < 1e-10);
      }
    CHECK((d.result.p_star - c.result.p_star).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("complete graph, 100 rounds, final dual values") {
    const auto g = generate_graph(GraphKind::Complete, 3);
    const auto k = testing::random_kernel(rng, 3, 0.4);
    const auto q = random_q_list(rng, 3, 3);
    const auto d = run(q, g, k, 100);
    const auto c = centralized_fgm(q, g, k, 100);
    CHECK(std::abs(d.trace.rounds.back().dual_value - c.result.trace.rounds.back().dual_value) < 1e-9);
  }
  SUBCASE("centralized oracle agrees with a naive Kronecker transcription") {
    for (auto kind : {GraphKind::Path, GraphKind::Star, GraphKind::Cycle}) {
      const auto g = generate_graph(kind, 4);
      const auto k = testing::random_kernel(rng, 3, 0.6);
      const auto q = random_q_list(rng, 4, 3);
      const auto c = centralized_fgm(q, g, k, 40);
      const auto naive = naive_centralized_y_tilde(q, g, k, 40);
      double gap = 0;
      for (std::size_t r = 0; r < naive.size(); ++r)
        gap = std::max(gap, (Eigen::Map<const Eigen::VectorXd>(c.y_tilde_history[r].data(), 12) - naive[r])
                                .cwiseAbs()
                                .maxCoeff());
      CHECK(gap < 1e-10);
    }
  }
  SUBCASE("random small instances") {
    const GraphKind kinds[] = {GraphKind::Path, GraphKind::Star, GraphKind::Cycle, GraphKind::Complete};
    for (int t = 0; t < 10; ++t) {
      const Index m = 2 + t % 4, n = 2 + (t * 3) % 9;
      const auto g = generate_graph(kinds[t % 4], m);
      const auto k = testing::random_kernel(rng, n, testing::uniform(rng, 0.1, 1.0));
      const auto q = random_q_list(rng, m, n);
      const auto d = run_with_history(q, g, k, 60);
      const auto c = centralized_fgm(q, g, k, 60);
      CHECK(max_history_gap(d.y_tilde, c.y_tilde_history) < 1e-10);
    }
  }
  SUBCASE("zero rounds return the initial state") {
    const auto g = generate_graph(GraphKind::Path, 2);
    const auto k = testing::random_kernel(rng, 3, 0.5);
    const auto q = random_q_list(rng, 2, 3);
    const auto d = run(q, g, k, 0);
    const auto c = centralized_fgm(q, g, k, 0);
    CHECK(d.y_star.isZero(0.0));
    CHECK(c.result.y_star.isZero(0.0));
    CHECK(d.trace.rounds.empty());
    CHECK((d.p_star - c.result.p_star).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("dense cap") {
    const auto g = generate_graph(GraphKind::Path, 70);
    const auto k = testing::random_kernel(rng, 60, 0.5);
    CHECK_ERROR_CODE(centralized_fgm(random_q_list(rng, 70, 60), g, k, 1), ErrorCode::DimensionTooLarge);
  }
}

TEST_CASE("convergence behaviour on a gaussian instance") {
  Rng rng(17);
  const auto grid = SupportGrid<double>::equispaced(-5, 5, 20);
  const auto k = build_kernel(euclidean_cost_matrix(grid), 0.1);
  const auto q = gaussian_q_list(rng, 6, grid);
  const auto g = generate_graph(GraphKind::Cycle, 6);

  std::vector<double> y_norm;
  RunOptions opts;
  opts.rounds = 1000;
  opts.observer = [&](Index, const std::vector<AgentState>& agents) {
    double s = 0;
    for (const auto& a : agents) s += a.y_tilde.squaredNorm();
    y_norm.push_back(std::sqrt(s));
  };
  const auto res = run(q, g, k, opts);
  const auto& tr = res.trace.rounds;

  // Dual value along w~_k, 0-indexed rows hold iterate k + 1.
  CHECK(tr[999].dual_value < tr[99].dual_value);
  CHECK(tr[99].dual_value < tr[9].dual_value);

  // Consensus of the ergodic average, smoothed over 50-round windows.
  std::vector<double> window;
  for (std::size_t s = 0; s + 50 <= tr.size(); s += 50) {
    double acc = 0;
    for (std::size_t r = s; r < s + 50; ++r) acc += tr[r].consensus_norm;
    window.push_back(acc / 50);
  }
  for (std::size_t i = 1; i < window.size(); ++i) CHECK(window[i] <= window[i - 1]);

  for (double v : y_norm) CHECK(v <= 10 * y_norm.back());
  CHECK(res.dual_radius() > 0.0);
}

TEST_CASE("iteration bounds") {
  const auto complete = laplacian(generate_graph(GraphKind::Complete, 10));
  const auto star = laplacian(generate_graph(GraphKind::Star, 10));
  CHECK(iteration_bound(1.0, 0.1, 0.01, complete) == 127);
  // sqrt(16 * 9 / 1e-3) = sqrt(144000) = 379.47
  CHECK(iteration_bound(1.0, 0.1, 0.01, star) == 380);
  // Exact square: sqrt(16 * 4 / 1) = 8.
  CHECK(iteration_bound(2.0, 1.0, 1.0, complete) == 8);
  // Halving eps scales by sqrt(2): 16000 -> 32000 -> 178.9.
  CHECK(iteration_bound(1.0, 0.1, 0.005, complete) == 179);

  CHECK(gamma_for_unregularized(0.4, 10, 3) == doctest::Approx(0.4 / (40.0 * std::log(3.0))));
  CHECK(gamma_for_unregularized(0.4, 20, 3) == doctest::Approx(gamma_for_unregularized(0.4, 10, 3) / 2));
  CHECK(gamma_for_unregularized(0.4, 10, 5) < gamma_for_unregularized(0.4, 10, 3));
  const auto setting = gamma_for_unregularized(0.4, 10, 3, 1.0, complete);
  // sqrt(128 * 10 * ln 3 / 0.16) = sqrt(8788.898...) = 93.75
  CHECK(setting.iteration_bound == 94);

  CHECK_ERROR_CODE(iteration_bound(0.0, 0.1, 0.01, complete), ErrorCode::NonPositiveParameter);
  CHECK_ERROR_CODE(iteration_bound(1.0, 0.1, -1.0, complete), ErrorCode::NonPositiveParameter);
  CHECK_ERROR_CODE(gamma_for_unregularized(0.0, 10, 3), ErrorCode::NonPositiveParameter);
  CHECK_ERROR_CODE(gamma_for_unregularized(0.4, 10, 1), ErrorCode::NTooSmall);
}
