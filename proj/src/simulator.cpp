#include "wbary/simulator.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace wbary {

MessageBus::MessageBus(const NetworkGraph& graph)
    : graph_(&graph), inbox_(static_cast<std::size_t>(graph.size())) {}

void MessageBus::begin_round(Index round) {
  round_ = round;
  messages_ = 0;
  scalars_ = 0;
  for (auto& box : inbox_) box.clear();
}

void MessageBus::send(RoundMessage msg) {
  if (!graph_->has_edge(msg.from, msg.to))
    throw Error(ErrorCode::TopologyViolation,
                "no edge " + std::to_string(msg.from) + " -> " + std::to_string(msg.to));
  if (msg.round != round_) throw Error(ErrorCode::InvalidParameter, "message stamped with a stale round");
  if ((msg.payload.array() < 0.0).any() || std::abs(msg.payload.sum() - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidParameter, "message payload is not a distribution");
  messages_ += 1;
  scalars_ += msg.payload.size();
  inbox_[static_cast<std::size_t>(msg.to)][msg.from] = std::move(msg.payload);
}

std::map<Index, Eigen::VectorXd> MessageBus::take_inbox(Index to) {
  return std::move(inbox_[static_cast<std::size_t>(to)]);
}

double total_dual_value(const Eigen::Ref<const Eigen::MatrixXd>& y_blocks, const std::vector<Distribution>& q_list,
                        const Kernel& kernel) {
  require_dims(y_blocks.cols() == static_cast<Index>(q_list.size()), "dual value: one column per agent expected");
  double acc = 0.0;
  for (Index i = 0; i < y_blocks.cols(); ++i)
    acc += dual_value(y_blocks.col(i), q_list[static_cast<std::size_t>(i)], kernel);
  return acc;
}

namespace {

double relative_error(double value, double reference_opt, double initial_val) {
  const double denom = initial_val - reference_opt;
  if (!(std::abs(denom) >= 1e-15))
    throw Error(ErrorCode::DegenerateReference, "initial and reference dual values coincide");
  return (value - reference_opt) / denom;
}

}  // namespace

double relative_dual_error(const Eigen::Ref<const Eigen::MatrixXd>& y_blocks, const std::vector<Distribution>& q_list,
                           const Kernel& kernel, double reference_opt, double initial_val) {
  return relative_error(total_dual_value(y_blocks, q_list, kernel), reference_opt, initial_val);
}

RunTrace run_rounds(const NetworkGraph& graph, std::vector<AgentState>& agents, const Kernel& kernel,
                    const RunOptions& options) {
  const Index m = graph.size();
  require_dims(static_cast<Index>(agents.size()) == m, "one agent state per node expected");
  if (options.rounds < 0) throw Error(ErrorCode::InvalidParameter, "rounds must be >= 0");
  if (options.stop == StopMode::Threshold && (!options.reference_optimum || !options.record_trace))
    throw Error(ErrorCode::InvalidParameter, "threshold mode needs a reference optimum and a trace");

  const Laplacian lap = laplacian(graph);
  // With no edges every Laplacian combination is zero and L only scales zero.
  const double L = lap.d_max > 0 ? smoothness_constant(lap, kernel.gamma()) : 1.0 / kernel.gamma();
  std::vector<LaplacianRow> rows;
  rows.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) rows.push_back(laplacian_row(lap, i));

  std::vector<Distribution> q_list;
  q_list.reserve(agents.size());
  for (const auto& a : agents) q_list.push_back(a.local_q);
  const Index n = kernel.size();

  RunTrace trace;
  trace.reference_optimum = options.reference_optimum;
  if (options.record_trace) {
    Eigen::MatrixXd w(n, m);
    for (Index i = 0; i < m; ++i) w.col(i) = agents[static_cast<std::size_t>(i)].w_tilde;
    trace.initial_dual_value = total_dual_value(w, q_list, kernel);
  }

  MessageBus bus(graph);
  std::vector<Eigen::VectorXd> primal(static_cast<std::size_t>(m));
  Eigen::MatrixXd w_blocks(n, m), avg_blocks(n, m);

  for (Index k = 0; k < options.rounds; ++k) {
    const StepSchedule sched{L, k};

    // Gradient phase: purely local.
    double grad_sq = 0.0;
    for (Index i = 0; i < m; ++i) {
      const auto& a = agents[static_cast<std::size_t>(i)];
      primal[static_cast<std::size_t>(i)] = dual_gradient(query_point(a, sched), a.local_q, kernel).weights();
      grad_sq += primal[static_cast<std::size_t>(i)].squaredNorm();
    }
    trace.max_gradient_norm = std::max(trace.max_gradient_norm, std::sqrt(grad_sq));

    // Exchange phase.
    bus.begin_round(k);
    for (Index i = 0; i < m; ++i)
      for (Index j : graph.neighbors(i)) bus.send({i, j, primal[static_cast<std::size_t>(i)], k});

    // Combine phase.
    for (Index i = 0; i < m; ++i) {
      auto& a = agents[static_cast<std::size_t>(i)];
      a = agent_round(std::move(a), bus.take_inbox(i), primal[static_cast<std::size_t>(i)],
                      rows[static_cast<std::size_t>(i)], sched);
    }

    if (options.observer) options.observer(k, agents);
    if (!options.record_trace) continue;

    RoundRecord rec;
    rec.round = k;
    rec.messages = bus.messages_this_round();
    rec.scalars = bus.scalars_this_round();
    for (Index i = 0; i < m; ++i) {
      w_blocks.col(i) = agents[static_cast<std::size_t>(i)].w_tilde;
      avg_blocks.col(i) = ergodic_estimate(agents[static_cast<std::size_t>(i)]);
    }
    rec.dual_value = total_dual_value(w_blocks, q_list, kernel);
    rec.e_star = options.reference_optimum
                     ? relative_error(rec.dual_value, *options.reference_optimum, trace.initial_dual_value)
                     : std::numeric_limits<double>::quiet_NaN();
    rec.consensus_norm = consensus_norm(avg_blocks, lap);
    trace.rounds.push_back(rec);

    if (options.stop == StopMode::Threshold && rec.e_star <= options.eps1 && rec.consensus_norm <= options.eps2) {
      trace.thresholds_met = true;
      break;
    }
  }
  return trace;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_trace_csv(const RunTrace& trace, std::ostream& out) {
  out << "round,dual_value,e_star,consensus_norm,messages,scalars\n";
  for (const auto& r : trace.rounds)
    out << r.round << ',' << format_double(r.dual_value) << ',' << format_double(r.e_star) << ','
        << format_double(r.consensus_norm) << ',' << r.messages << ',' << r.scalars << '\n';
}

}  // namespace wbary
