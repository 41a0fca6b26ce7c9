#pragma once

#include "wbary/core.hpp"

#include <Eigen/Sparse>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace wbary {

enum class GraphKind { Star, Cycle, Complete, ErdosRenyi, Path };

GraphKind parse_graph_kind(const std::string& name);
std::string to_string(GraphKind kind);

/// Undirected, connected, unit-weight graph without self-loops.
class NetworkGraph {
 public:
  using Edge = std::pair<Index, Index>;

  NetworkGraph() = default;

  /// Throws InvalidParameter on self-loops, out-of-range endpoints or a
  /// disconnected result. Duplicate and reversed pairs are merged.
  static NetworkGraph from_edges(Index m, const std::vector<Edge>& edges);

  Index size() const { return m_; }
  Index edge_count() const { return static_cast<Index>(edges_.size()); }
  /// Edges with first < second, sorted.
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<Index>& neighbors(Index i) const { return adjacency_[static_cast<std::size_t>(i)]; }
  Index degree(Index i) const { return static_cast<Index>(neighbors(i).size()); }
  bool has_edge(Index i, Index j) const;

  /// Number of rejected Erdos-Renyi draws before a connected one was found.
  Index resamples() const { return resamples_; }
  /// Edges added to join the components of the final draw when no draw was
  /// connected.
  Index bridges() const { return bridges_; }

 private:
  friend NetworkGraph generate_graph(GraphKind, Index, std::optional<double>, std::uint64_t);

  Index m_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> adjacency_;
  Index resamples_ = 0;
  Index bridges_ = 0;
};

inline constexpr Index kMaxErdosRenyiDraws = 100;

bool is_connected(Index m, const std::vector<NetworkGraph::Edge>& edges);

/// Connected-component index of every node, numbered by smallest member.
std::vector<Index> component_labels(Index m, const std::vector<NetworkGraph::Edge>& edges);

/// Deterministic for a fixed seed. Erdos-Renyi graphs are redrawn until
/// connected, up to kMaxErdosRenyiDraws draws; after that the components of
/// the last draw are bridged by random edges.
NetworkGraph generate_graph(GraphKind kind, Index m, std::optional<double> edge_prob = std::nullopt,
                            std::uint64_t seed = 0);

/// Graph Laplacian: degree on the diagonal, -1 per edge.
struct Laplacian {
  Eigen::SparseMatrix<double> matrix;
  Index d_max = 0;
  Index d_min = 0;

  Index size() const { return matrix.rows(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

Laplacian laplacian(const NetworkGraph& graph);

std::pair<Index, Index> degree_extremes(const NetworkGraph& graph);

/// ||sqrt(W) p||_2 with W = Lap (x) I_n, as sqrt(sum over edges ||p_i - p_j||^2).
/// `blocks` holds one agent per column (n x m).
double consensus_norm(const Eigen::Ref<const Eigen::MatrixXd>& blocks, const Laplacian& lap);

/// Same quantity from the stacked m*n vector [p_1; ...; p_m].
double consensus_norm_stacked(const Eigen::Ref<const Eigen::VectorXd>& p_stacked, const Laplacian& lap);

/// p^T (Lap (x) I_n) p, summed entry by entry over the Laplacian.
double laplacian_quadratic_form(const Eigen::Ref<const Eigen::MatrixXd>& blocks, const Laplacian& lap);

/// d_max / gamma.
double smoothness_constant(const Laplacian& lap, double gamma);

/// Edge-list text: first line m, then "i j" per edge, 0-indexed.
void write_edge_list(const NetworkGraph& graph, std::ostream& out);
NetworkGraph read_edge_list(std::istream& in);

}  // namespace wbary
