#pragma once

#include "wbary/dfgm.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace wbary {

struct RoundMessage {
  Index from = 0;
  Index to = 0;
  Eigen::VectorXd payload;
  Index round = 0;
};

/// Synchronous mailbox. Every send is checked against the edge set.
class MessageBus {
 public:
  explicit MessageBus(const NetworkGraph& graph);

  void begin_round(Index round);
  /// Throws TopologyViolation for non-edges, InvalidParameter for stale rounds
  /// or payloads off the simplex.
  void send(RoundMessage msg);
  /// Messages delivered to `to` in the current round, keyed by sender.
  std::map<Index, Eigen::VectorXd> take_inbox(Index to);

  Index messages_this_round() const { return messages_; }
  Index scalars_this_round() const { return scalars_; }

 private:
  const NetworkGraph* graph_;
  Index round_ = 0;
  Index messages_ = 0;
  Index scalars_ = 0;
  std::vector<std::map<Index, Eigen::VectorXd>> inbox_;
};

/// Executes rounds: gradient phase, exchange, combine, then metric collection.
/// Stops after options.rounds or, in threshold mode, once e* <= eps1 and the
/// consensus norm <= eps2.
RunTrace run_rounds(const NetworkGraph& graph, std::vector<AgentState>& agents, const Kernel& kernel,
                    const RunOptions& options);

/// sum_i W*_{gamma, q_i}(y_i) with one agent per column of y_blocks.
double total_dual_value(const Eigen::Ref<const Eigen::MatrixXd>& y_blocks, const std::vector<Distribution>& q_list,
                        const Kernel& kernel);

/// (D(y) - D*) / (D(y_0) - D*).
double relative_dual_error(const Eigen::Ref<const Eigen::MatrixXd>& y_blocks, const std::vector<Distribution>& q_list,
                           const Kernel& kernel, double reference_opt, double initial_val);

/// CSV with header round,dual_value,e_star,consensus_norm,messages,scalars.
void write_trace_csv(const RunTrace& trace, std::ostream& out);

/// Shortest round-trip decimal form, locale independent.
std::string format_double(double v);

}  // namespace wbary
