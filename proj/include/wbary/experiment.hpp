#pragma once

#include "wbary/dfgm.hpp"
#include "wbary/io.hpp"
#include "wbary/network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wbary {

enum class ExperimentKind { Gaussian, Images, Custom };

enum class ReferencePolicy { None, Ibp };

const char* to_string(ExperimentKind kind);
const char* to_string(ReferencePolicy policy);

/// Everything needed to reproduce one experiment. Text form is one
/// `key = value` per line; `#` starts a comment.
///
///   experiment      gaussian | images | custom
///   m, n            agents and support size (n is ignored for images)
///   gamma           entropic regularization
///   graph           star | cycle | complete | erdos_renyi | path
///   edge_prob       Erdos-Renyi edge probability
///   seed            drives the graph, the inputs and image placement
///   rounds          round budget
///   stop            fixed | threshold
///   eps1, eps2      e* and consensus thresholds
///   mu_min, mu_max, sigma_min, sigma_max, support_min, support_max
///                   gaussian inputs on an equispaced support
///   idx_images, idx_labels, digits, canvas, scale_min, scale_max,
///   pixel_spacing, separable
///                   image inputs; digits is a comma list, empty for all
///   distributions   custom inputs: CSV, one agent per row
///   reference       ibp | none
///   cache_dir       reference optimum cache, default <output_dir>/cache
///   output_dir
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Gaussian;
  Index m = 10;
  Index n = 20;
  double gamma = 0.1;
  GraphKind graph = GraphKind::Complete;
  std::optional<double> edge_prob;
  std::uint64_t seed = 1;
  Index rounds = 1000;
  StopMode stop = StopMode::FixedRounds;
  double eps1 = 1e-8;
  double eps2 = 1e-6;

  double mu_min = -5.0, mu_max = 5.0;
  double sigma_min = 0.1, sigma_max = 2.0;
  double support_min = -5.0, support_max = 5.0;

  std::string idx_images;
  std::string idx_labels;
  std::vector<int> digits;
  Index canvas = 56;
  double scale_min = 0.5, scale_max = 2.0;
  /// Lattice step; 0 places the canvas on the unit square.
  double pixel_spacing = 0.0;
  bool separable = true;

  std::string distributions;

  ReferencePolicy reference = ReferencePolicy::Ibp;
  std::string cache_dir;
  std::string output_dir = "out";

  bool operator==(const ExperimentConfig&) const = default;

  double effective_pixel_spacing() const;
  std::filesystem::path effective_cache_dir() const;
};

/// Applies `key = value` lines on top of `cfg`. Unknown keys and malformed
/// values raise ConfigError with the line number.
void apply_config_text(ExperimentConfig& cfg, std::string_view text);
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& cfg);
/// Range and consistency checks. Throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

std::vector<std::string> preset_names();
/// Config lines of a named preset; ConfigError for unknown names.
std::string preset_text(std::string_view name);

/// One barycenter problem: the agents' inputs on a shared support.
struct Problem {
  std::string label;
  std::vector<Distribution> q_list;
  SupportGrid<double> grid;
  Kernel kernel;
};

NetworkGraph build_graph(const ExperimentConfig& cfg);
/// One problem per digit for labelled image sets, otherwise exactly one.
std::vector<Problem> build_problems(const ExperimentConfig& cfg);

/// FNV-1a over the fields that define the optimization problem.
std::uint64_t problem_hash(const ExperimentConfig& cfg, std::string_view label);

/// Reads the cached optimum or computes it with reference_dual_optimum and
/// stores it.
double cached_reference_optimum(const ExperimentConfig& cfg, const Problem& problem);

struct RunReport {
  std::string label;
  std::filesystem::path directory;
  RunResult result;
  std::optional<double> reference_optimum;
  double wall_seconds = 0.0;
};

struct ExperimentReport {
  NetworkGraph graph;
  std::vector<RunReport> runs;
};

/// Runs every problem on the shared graph and writes trace.csv,
/// barycenter_agent<i>.{csv,pgm} and summary.txt under output_dir, or under
/// output_dir/digit<d> for labelled images.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Procedural digit glyphs (28 x 28, values 0..255) with random slant,
/// stroke width and jitter. `count` images per digit, labels in order.
struct GlyphSet {
  std::vector<Eigen::MatrixXd> images;
  std::vector<std::uint8_t> labels;
};

GlyphSet synthetic_digits(Index count, std::uint64_t seed);

}  // namespace wbary
