#include "wbary/dfgm.hpp"
#include "wbary/simulator.hpp"

namespace wbary {

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  const Eigen::VectorXd root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * root.asDiagonal() * es.eigenvectors().transpose();
}

CentralizedRun centralized_fgm(const std::vector<Distribution>& q_list, const NetworkGraph& graph,
                               const Kernel& kernel, Index rounds) {
  const Index m = graph.size(), n = kernel.size();
  require_dims(static_cast<Index>(q_list.size()) == m, "one distribution per agent expected");
  if (m * n > kMaxCentralizedDim)
    throw Error(ErrorCode::DimensionTooLarge, "m * n = " + std::to_string(m * n) + " exceeds the dense cap");
  if (rounds < 0) throw Error(ErrorCode::InvalidParameter, "rounds must be >= 0");

  const Laplacian lap = laplacian(graph);
  const double L = lap.d_max > 0 ? smoothness_constant(lap, kernel.gamma()) : 1.0 / kernel.gamma();

  CentralizedRun out;
  out.sqrt_laplacian = psd_sqrt(lap.dense());
  const Eigen::MatrixXd& S = out.sqrt_laplacian;

  Eigen::MatrixXd y_hat = Eigen::MatrixXd::Zero(n, m);
  Eigen::MatrixXd w_hat = y_hat, z_hat = y_hat, accum = y_hat, primal(n, m);
  const double initial = total_dual_value(w_hat, q_list, kernel);

  for (Index k = 0; k < rounds; ++k) {
    const StepSchedule sched{L, k};
    y_hat = sched.tau() * z_hat + (1.0 - sched.tau()) * w_hat;
    // Block i of sqrt(W) y is sum_j S_ij y_j, i.e. Y S for symmetric S.
    const Eigen::MatrixXd y_tilde = y_hat * S;
    for (Index i = 0; i < m; ++i)
      primal.col(i) = dual_gradient(y_tilde.col(i), q_list[static_cast<std::size_t>(i)], kernel).weights();
    const Eigen::MatrixXd grad = primal * S;
    w_hat = y_hat - grad / L;
    z_hat -= sched.alpha_next() * grad;
    accum += double(k + 2) * primal;

    out.y_hat_history.push_back(y_hat);
    out.y_tilde_history.push_back(y_tilde);

    RoundRecord rec;
    rec.round = k;
    rec.dual_value = total_dual_value(w_hat * S, q_list, kernel);
    Eigen::MatrixXd avg = accum;
    for (Index i = 0; i < m; ++i) avg.col(i) /= avg.col(i).sum();
    rec.consensus_norm = consensus_norm(avg, lap);
    out.result.trace.rounds.push_back(rec);
    out.result.trace.max_gradient_norm = std::max(out.result.trace.max_gradient_norm, primal.norm());
  }

  out.result.trace.initial_dual_value = initial;
  out.result.rounds = rounds;
  out.result.y_star = w_hat * S;
  out.result.p_star.resize(n, m);
  for (Index i = 0; i < m; ++i) {
    if (rounds > 0)
      out.result.p_star.col(i) = accum.col(i) / accum.col(i).sum();
    else
      out.result.p_star.col(i) =
          dual_gradient(Eigen::VectorXd::Zero(n), q_list[static_cast<std::size_t>(i)], kernel).weights();
  }
  return out;
}

}  // namespace wbary
