#pragma once

#include "wbary/core.hpp"
#include "wbary/distributions.hpp"
#include "wbary/entropic_ot.hpp"
#include "wbary/network.hpp"

#include <functional>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace wbary {

using Distribution = DiscreteDistribution<double>;
using Kernel = CostKernel<double>;

/// tau_k = 2 / (k + 2) and alpha_{k+1} = (k + 2) / (2 L).
struct StepSchedule {
  double L = 1.0;
  Index k = 0;

  double tau() const { return 2.0 / double(k + 2); }
  double alpha_next() const { return double(k + 2) / (2.0 * L); }
};

std::pair<double, double> schedule(Index k, double L);

/// Local iterates of one agent, in the distributed (tilde) coordinates.
struct AgentState {
  Index agent_id = 0;
  Distribution local_q;
  Eigen::VectorXd y_tilde;
  Eigen::VectorXd w_tilde;
  Eigen::VectorXd z_tilde;
  /// Running sum of (k + 2) * p_k over completed rounds.
  Eigen::VectorXd primal_avg;
  Index rounds = 0;

  static AgentState initial(Index id, Distribution q);
};

/// One row of the graph Laplacian as seen by its agent.
struct LaplacianRow {
  Index agent = 0;
  Index degree = 0;
  std::vector<Index> neighbors;
};

LaplacianRow laplacian_row(const Laplacian& lap, Index agent);

/// Query point tau_k z_k + (1 - tau_k) w_k where the local gradient is taken.
Eigen::VectorXd query_point(const AgentState& state, const StepSchedule& sched);

/// Combine phase of one round. `own_primal` must be the dual gradient at the
/// query point; `neighbor_primal` must hold exactly the neighbors' vectors.
AgentState agent_round(AgentState state, const std::map<Index, Eigen::VectorXd>& neighbor_primal,
                       const Eigen::VectorXd& own_primal, const LaplacianRow& row,
                       const StepSchedule& sched);

/// Weights 2 (k + 2) / (N (N + 3)), k = 0..N-1. They sum to one.
std::vector<double> ergodic_weights(Index N);

Eigen::VectorXd ergodic_average(const std::vector<Eigen::VectorXd>& primal_history);

/// Ergodic primal of an agent after state.rounds rounds, normalized onto the simplex.
Eigen::VectorXd ergodic_estimate(const AgentState& state);

enum class StopMode { FixedRounds, Threshold };

struct RoundRecord {
  Index round = 0;
  double dual_value = 0.0;
  double e_star = 0.0;
  double consensus_norm = 0.0;
  Index messages = 0;
  Index scalars = 0;
};

struct RunTrace {
  std::vector<RoundRecord> rounds;
  /// Largest stacked-gradient norm ||p(y_tilde)||_2 seen in any round.
  double max_gradient_norm = 0.0;
  /// Dual value at the zero starting point.
  double initial_dual_value = 0.0;
  std::optional<double> reference_optimum;
  bool thresholds_met = false;
};

struct RunOptions {
  Index rounds = 1000;
  StopMode stop = StopMode::FixedRounds;
  double eps1 = 1e-8;
  double eps2 = 1e-6;
  /// Optimal value of the dual problem. Required for e* and threshold mode.
  std::optional<double> reference_optimum;
  /// Per-round dual value, e* and consensus bookkeeping.
  bool record_trace = true;
  /// Called after every combine phase with the agents' states.
  std::function<void(Index round, const std::vector<AgentState>& agents)> observer;
};

struct RunResult {
  /// Ergodic primal averages, one agent per column (n x m).
  Eigen::MatrixXd p_star;
  /// Final w_tilde, one agent per column.
  Eigen::MatrixXd y_star;
  RunTrace trace;
  Index rounds = 0;

  Distribution barycenter(Index agent) const { return Distribution(p_star.col(agent)); }
  /// ||y*_N||_2 over the stacked vector.
  double dual_radius() const { return y_star.norm(); }
};

/// Distributed fast gradient method, executed round by round on the
/// message-passing simulator.
RunResult run(const std::vector<Distribution>& q_list, const NetworkGraph& graph, const Kernel& kernel,
              const RunOptions& options);

RunResult run(const std::vector<Distribution>& q_list, const NetworkGraph& graph, const Kernel& kernel,
              Index rounds);

/// Centralized recursion in the hat coordinates with an explicit sqrt(W).
struct CentralizedRun {
  RunResult result;
  Eigen::MatrixXd sqrt_laplacian;
  /// sqrt(W) y_hat_k for k = 1..N, one agent per column.
  std::vector<Eigen::MatrixXd> y_tilde_history;
  std::vector<Eigen::MatrixXd> y_hat_history;
};

inline constexpr Index kMaxCentralizedDim = 4096;

/// Test oracle; m * n must not exceed kMaxCentralizedDim.
CentralizedRun centralized_fgm(const std::vector<Distribution>& q_list, const NetworkGraph& graph,
                               const Kernel& kernel, Index rounds);

/// Symmetric PSD square root by eigendecomposition.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& sym);

/// ceil(sqrt(16 G^2 d_max / (gamma eps d_min))).
Index iteration_bound(double G, double gamma, double eps, const Laplacian& lap);

struct UnregularizedSetting {
  double gamma = 0.0;
  Index iteration_bound = 0;
};

/// gamma = eps / (4 m ln n) and ceil(sqrt(128 G^2 m ln n / eps^2 * d_max / d_min)).
UnregularizedSetting gamma_for_unregularized(double eps, Index m, Index n, double G, const Laplacian& lap);

/// Only the regularization level.
double gamma_for_unregularized(double eps, Index m, Index n);

}  // namespace wbary
