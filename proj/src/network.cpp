#include "wbary/network.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <queue>
#include <random>
#include <sstream>

namespace wbary {

GraphKind parse_graph_kind(const std::string& name) {
  if (name == "star") return GraphKind::Star;
  if (name == "cycle") return GraphKind::Cycle;
  if (name == "complete") return GraphKind::Complete;
  if (name == "erdos_renyi" || name == "er") return GraphKind::ErdosRenyi;
  if (name == "path") return GraphKind::Path;
  throw Error(ErrorCode::InvalidParameter, "unknown graph kind '" + name + "'");
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Star: return "star";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::Complete: return "complete";
    case GraphKind::ErdosRenyi: return "erdos_renyi";
    case GraphKind::Path: return "path";
  }
  return "unknown";
}

std::vector<Index> component_labels(Index m, const std::vector<NetworkGraph::Edge>& edges) {
  std::vector<std::vector<Index>> adj(static_cast<std::size_t>(m));
  for (auto [a, b] : edges) {
    adj[static_cast<std::size_t>(a)].push_back(b);
    adj[static_cast<std::size_t>(b)].push_back(a);
  }
  std::vector<Index> label(static_cast<std::size_t>(m), -1);
  Index next = 0;
  for (Index root = 0; root < m; ++root) {
    if (label[static_cast<std::size_t>(root)] >= 0) continue;
    std::queue<Index> frontier;
    frontier.push(root);
    label[static_cast<std::size_t>(root)] = next;
    while (!frontier.empty()) {
      const Index u = frontier.front();
      frontier.pop();
      for (Index v : adj[static_cast<std::size_t>(u)]) {
        if (label[static_cast<std::size_t>(v)] >= 0) continue;
        label[static_cast<std::size_t>(v)] = next;
        frontier.push(v);
      }
    }
    ++next;
  }
  return label;
}

bool is_connected(Index m, const std::vector<NetworkGraph::Edge>& edges) {
  if (m <= 1) return true;
  const auto label = component_labels(m, edges);
  return std::all_of(label.begin(), label.end(), [](Index l) { return l == 0; });
}

NetworkGraph NetworkGraph::from_edges(Index m, const std::vector<Edge>& edges) {
  if (m < 1) throw Error(ErrorCode::InvalidParameter, "graph needs at least one node");
  NetworkGraph g;
  g.m_ = m;
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= m || b >= m)
      throw Error(ErrorCode::InvalidParameter, "edge endpoint out of range");
    if (a == b) throw Error(ErrorCode::InvalidParameter, "self-loops are not allowed");
    g.edges_.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  g.edges_.erase(std::unique(g.edges_.begin(), g.edges_.end()), g.edges_.end());
  if (!is_connected(m, g.edges_)) throw Error(ErrorCode::InvalidParameter, "graph is not connected");
  g.adjacency_.assign(static_cast<std::size_t>(m), {});
  for (auto [a, b] : g.edges_) {
    g.adjacency_[static_cast<std::size_t>(a)].push_back(b);
    g.adjacency_[static_cast<std::size_t>(b)].push_back(a);
  }
  for (auto& nb : g.adjacency_) std::sort(nb.begin(), nb.end());
  return g;
}

bool NetworkGraph::has_edge(Index i, Index j) const {
  if (i < 0 || j < 0 || i >= m_ || j >= m_) return false;
  const auto& nb = neighbors(i);
  return std::binary_search(nb.begin(), nb.end(), j);
}

NetworkGraph generate_graph(GraphKind kind, Index m, std::optional<double> edge_prob, std::uint64_t seed) {
  if (m < 1) throw Error(ErrorCode::InvalidParameter, "graph needs at least one node");
  if (kind == GraphKind::ErdosRenyi) {
    if (!edge_prob || !(*edge_prob > 0.0 && *edge_prob <= 1.0))
      throw Error(ErrorCode::InvalidParameter, "erdos_renyi needs edge_prob in (0, 1]");
  } else if (edge_prob) {
    throw Error(ErrorCode::InvalidParameter, "edge_prob only applies to erdos_renyi");
  }

  std::vector<NetworkGraph::Edge> edges;
  switch (kind) {
    case GraphKind::Star:
      for (Index i = 1; i < m; ++i) edges.emplace_back(0, i);
      break;
    case GraphKind::Path:
      for (Index i = 1; i < m; ++i) edges.emplace_back(i - 1, i);
      break;
    case GraphKind::Cycle:
      for (Index i = 1; i < m; ++i) edges.emplace_back(i - 1, i);
      if (m > 2) edges.emplace_back(0, m - 1);
      break;
    case GraphKind::Complete:
      for (Index i = 0; i < m; ++i)
        for (Index j = i + 1; j < m; ++j) edges.emplace_back(i, j);
      break;
    case GraphKind::ErdosRenyi: {
      std::mt19937_64 rng(seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      for (Index draw = 0; draw < kMaxErdosRenyiDraws; ++draw) {
        edges.clear();
        for (Index i = 0; i < m; ++i)
          for (Index j = i + 1; j < m; ++j)
            if (unit(rng) < *edge_prob) edges.emplace_back(i, j);
        if (is_connected(m, edges)) {
          NetworkGraph g = NetworkGraph::from_edges(m, edges);
          g.resamples_ = draw;
          return g;
        }
      }
      // Sparse regimes (e.g. m p = 4) almost never produce a connected draw.
      // Join the components of the last draw, each to a random earlier node.
      const auto labels = component_labels(m, edges);
      std::vector<std::vector<Index>> members;
      for (Index v = 0; v < m; ++v) {
        const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(v)]);
        if (c >= members.size()) members.resize(c + 1);
        members[c].push_back(v);
      }
      Index bridges = 0;
      std::vector<Index> joined = members[0];
      for (std::size_t c = 1; c < members.size(); ++c) {
        std::uniform_int_distribution<std::size_t> pick_old(0, joined.size() - 1), pick_new(0, members[c].size() - 1);
        edges.emplace_back(joined[pick_old(rng)], members[c][pick_new(rng)]);
        ++bridges;
        joined.insert(joined.end(), members[c].begin(), members[c].end());
      }
      NetworkGraph g = NetworkGraph::from_edges(m, edges);
      g.resamples_ = kMaxErdosRenyiDraws - 1;
      g.bridges_ = bridges;
      return g;
    }
  }
  return NetworkGraph::from_edges(m, edges);
}

Laplacian laplacian(const NetworkGraph& graph) {
  const Index m = graph.size();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(m + 2 * graph.edge_count()));
  for (Index i = 0; i < m; ++i) entries.emplace_back(i, i, double(graph.degree(i)));
  for (auto [a, b] : graph.edges()) {
    entries.emplace_back(a, b, -1.0);
    entries.emplace_back(b, a, -1.0);
  }
  Laplacian lap;
  lap.matrix.resize(m, m);
  lap.matrix.setFromTriplets(entries.begin(), entries.end());
  lap.matrix.makeCompressed();
  std::tie(lap.d_max, lap.d_min) = degree_extremes(graph);
  return lap;
}

std::pair<Index, Index> degree_extremes(const NetworkGraph& graph) {
  Index hi = graph.degree(0), lo = graph.degree(0);
  for (Index i = 1; i < graph.size(); ++i) {
    hi = std::max(hi, graph.degree(i));
    lo = std::min(lo, graph.degree(i));
  }
  return {hi, lo};
}

double consensus_norm(const Eigen::Ref<const Eigen::MatrixXd>& blocks, const Laplacian& lap) {
  require_dims(blocks.cols() == lap.size(), "consensus norm: one column per agent expected");
  double acc = 0.0;
  for (Index col = 0; col < lap.matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lap.matrix, col); it; ++it)
      if (it.row() < it.col() && it.value() != 0.0)
        acc += -it.value() * (blocks.col(it.row()) - blocks.col(it.col())).squaredNorm();
  return std::sqrt(acc);
}

double consensus_norm_stacked(const Eigen::Ref<const Eigen::VectorXd>& p_stacked, const Laplacian& lap) {
  const Index m = lap.size();
  require_dims(m > 0 && p_stacked.size() % m == 0, "consensus norm: length is not a multiple of m");
  const Index n = p_stacked.size() / m;
  Eigen::Map<const Eigen::MatrixXd> blocks(p_stacked.data(), n, m);
  return consensus_norm(blocks, lap);
}

double laplacian_quadratic_form(const Eigen::Ref<const Eigen::MatrixXd>& blocks, const Laplacian& lap) {
  require_dims(blocks.cols() == lap.size(), "quadratic form: one column per agent expected");
  double acc = 0.0;
  for (Index col = 0; col < lap.matrix.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(lap.matrix, col); it; ++it)
      acc += it.value() * blocks.col(it.row()).dot(blocks.col(it.col()));
  return acc;
}

double smoothness_constant(const Laplacian& lap, double gamma) {
  if (!(gamma > 0.0)) throw Error(ErrorCode::NonPositiveGamma, "gamma must be positive");
  return double(lap.d_max) / gamma;
}

void write_edge_list(const NetworkGraph& graph, std::ostream& out) {
  out << graph.size() << '\n';
  for (auto [a, b] : graph.edges()) out << a << ' ' << b << '\n';
}

NetworkGraph read_edge_list(std::istream& in) {
  std::string line;
  Index m = -1;
  std::vector<NetworkGraph::Edge> edges;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    if (m < 0) {
      if (!(row >> m)) throw Error(ErrorCode::IoError, "edge list: bad node count line");
      continue;
    }
    Index a = 0, b = 0;
    if (!(row >> a >> b)) throw Error(ErrorCode::IoError, "edge list: bad edge line '" + line + "'");
    edges.emplace_back(a, b);
  }
  if (m < 0) throw Error(ErrorCode::IoError, "edge list: missing node count");
  return NetworkGraph::from_edges(m, edges);
}

}  // namespace wbary
