#include "wbary/dfgm.hpp"
#include "wbary/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wbary {

std::pair<double, double> schedule(Index k, double L) {
  if (k < 0 || !(L > 0.0)) throw Error(ErrorCode::InvalidParameter, "schedule needs k >= 0 and L > 0");
  const StepSchedule s{L, k};
  return {s.tau(), s.alpha_next()};
}

AgentState AgentState::initial(Index id, Distribution q) {
  const Index n = q.size();
  AgentState s;
  s.agent_id = id;
  s.local_q = std::move(q);
  s.y_tilde = Eigen::VectorXd::Zero(n);
  s.w_tilde = Eigen::VectorXd::Zero(n);
  s.z_tilde = Eigen::VectorXd::Zero(n);
  s.primal_avg = Eigen::VectorXd::Zero(n);
  return s;
}

LaplacianRow laplacian_row(const Laplacian& lap, Index agent) {
  LaplacianRow row;
  row.agent = agent;
  // Column `agent` equals row `agent` by symmetry; inner indices come sorted.
  for (Eigen::SparseMatrix<double>::InnerIterator it(lap.matrix, agent); it; ++it) {
    if (it.row() == agent)
      row.degree = static_cast<Index>(it.value());
    else if (it.value() != 0.0)
      row.neighbors.push_back(it.row());
  }
  return row;
}

Eigen::VectorXd query_point(const AgentState& state, const StepSchedule& sched) {
  const double tau = sched.tau();
  return tau * state.z_tilde + (1.0 - tau) * state.w_tilde;
}

AgentState agent_round(AgentState state, const std::map<Index, Eigen::VectorXd>& neighbor_primal,
                       const Eigen::VectorXd& own_primal, const LaplacianRow& row,
                       const StepSchedule& sched) {
  const Index n = state.w_tilde.size();
  require_dims(own_primal.size() == n, "agent round: primal length differs from state");
  for (const auto& [from, payload] : neighbor_primal) {
    if (!std::binary_search(row.neighbors.begin(), row.neighbors.end(), from))
      throw Error(ErrorCode::TopologyViolation,
                  "agent " + std::to_string(row.agent) + " read the primal of non-neighbor " + std::to_string(from));
    require_dims(payload.size() == n, "agent round: neighbor payload length");
  }

  state.y_tilde = query_point(state, sched);
  // g = [Lap (x) I_n] p restricted to this agent's block.
  Eigen::VectorXd g = double(row.degree) * own_primal;
  for (Index j : row.neighbors) {
    auto it = neighbor_primal.find(j);
    if (it == neighbor_primal.end())
      throw Error(ErrorCode::MissingNeighborMessage,
                  "agent " + std::to_string(row.agent) + " has no message from " + std::to_string(j));
    g -= it->second;
  }
  state.w_tilde = state.y_tilde - g / sched.L;
  state.z_tilde -= sched.alpha_next() * g;
  state.primal_avg += double(sched.k + 2) * own_primal;
  state.rounds = sched.k + 1;
  return state;
}

std::vector<double> ergodic_weights(Index N) {
  if (N < 1) throw Error(ErrorCode::InvalidParameter, "ergodic weights need N >= 1");
  const double denom = double(N) * double(N + 3);
  std::vector<double> w(static_cast<std::size_t>(N));
  for (Index k = 0; k < N; ++k) w[static_cast<std::size_t>(k)] = 2.0 * double(k + 2) / denom;
  return w;
}

Eigen::VectorXd ergodic_average(const std::vector<Eigen::VectorXd>& primal_history) {
  const auto w = ergodic_weights(static_cast<Index>(primal_history.size()));
  Eigen::VectorXd out = Eigen::VectorXd::Zero(primal_history.front().size());
  for (std::size_t k = 0; k < w.size(); ++k) out += w[k] * primal_history[k];
  return out;
}

Eigen::VectorXd ergodic_estimate(const AgentState& state) {
  if (state.rounds < 1) throw Error(ErrorCode::InvalidParameter, "no rounds completed yet");
  return state.primal_avg / state.primal_avg.sum();
}

namespace {

void check_instance(const std::vector<Distribution>& q_list, const NetworkGraph& graph, const Kernel& kernel) {
  require_dims(static_cast<Index>(q_list.size()) == graph.size(), "one distribution per agent expected");
  for (const auto& q : q_list) require_dims(q.size() == kernel.size(), "distribution support differs from kernel");
}

}  // namespace

RunResult run(const std::vector<Distribution>& q_list, const NetworkGraph& graph, const Kernel& kernel,
              const RunOptions& options) {
  check_instance(q_list, graph, kernel);
  std::vector<AgentState> agents;
  agents.reserve(q_list.size());
  for (std::size_t i = 0; i < q_list.size(); ++i) agents.push_back(AgentState::initial(Index(i), q_list[i]));

  RunResult result;
  result.trace = run_rounds(graph, agents, kernel, options);
  const Index n = kernel.size(), m = graph.size();
  result.p_star.resize(n, m);
  result.y_star.resize(n, m);
  for (Index i = 0; i < m; ++i) {
    const auto& a = agents[static_cast<std::size_t>(i)];
    result.p_star.col(i) = a.rounds > 0 ? ergodic_estimate(a) : dual_gradient(a.w_tilde, a.local_q, kernel).weights();
    result.y_star.col(i) = a.w_tilde;
  }
  result.rounds = agents.front().rounds;
  return result;
}

RunResult run(const std::vector<Distribution>& q_list, const NetworkGraph& graph, const Kernel& kernel,
              Index rounds) {
  RunOptions opts;
  opts.rounds = rounds;
  return run(q_list, graph, kernel, opts);
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveParameter, std::string(name) + " must be positive");
}

/// Smallest integer N with N >= sqrt(x).
Index ceil_sqrt(double x) {
  double c = std::ceil(std::sqrt(x));
  if (c >= 1.0 && (c - 1.0) * (c - 1.0) >= x) c -= 1.0;
  return static_cast<Index>(c);
}

double degree_ratio(const Laplacian& lap) {
  if (lap.d_min < 1) throw Error(ErrorCode::NonPositiveParameter, "bound needs d_min >= 1");
  return double(lap.d_max) / double(lap.d_min);
}

}  // namespace

Index iteration_bound(double G, double gamma, double eps, const Laplacian& lap) {
  require_positive(G, "G");
  require_positive(gamma, "gamma");
  require_positive(eps, "eps");
  return ceil_sqrt(16.0 * G * G / (gamma * eps) * degree_ratio(lap));
}

double gamma_for_unregularized(double eps, Index m, Index n) {
  require_positive(eps, "eps");
  if (m < 1) throw Error(ErrorCode::NonPositiveParameter, "m must be positive");
  if (n < 2) throw Error(ErrorCode::NTooSmall, "support size must be at least 2");
  return eps / (4.0 * double(m) * std::log(double(n)));
}

UnregularizedSetting gamma_for_unregularized(double eps, Index m, Index n, double G, const Laplacian& lap) {
  UnregularizedSetting s;
  s.gamma = gamma_for_unregularized(eps, m, n);
  require_positive(G, "G");
  s.iteration_bound = ceil_sqrt(128.0 * G * G * double(m) * std::log(double(n)) / (eps * eps) * degree_ratio(lap));
  return s;
}

}  // namespace wbary
