#include "wbary/experiment.hpp"
#include "wbary/io.hpp"
#include "wbary/network.hpp"
#include "wbary/simulator.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

int exit_code(wbary::ErrorCode code) {
  switch (code) {
    case wbary::ErrorCode::ConfigError:
    case wbary::ErrorCode::InvalidParameter: return 2;
    case wbary::ErrorCode::IoError:
    case wbary::ErrorCode::BadMagic:
    case wbary::ErrorCode::TruncatedFile: return 3;
    default: return 4;
  }
}

int cmd_run(const std::string& config_path, const std::string& preset, std::optional<wbary::Index> rounds,
            std::optional<std::uint64_t> seed, const std::string& output) {
  wbary::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = wbary::load_config(config_path);
  if (!preset.empty()) wbary::apply_config_text(cfg, wbary::preset_text(preset));
  if (rounds) cfg.rounds = *rounds;
  if (seed) cfg.seed = *seed;
  if (!output.empty()) cfg.output_dir = output;

  const auto report = wbary::run_experiment(cfg);
  for (const auto& r : report.runs) {
    const auto& tr = r.result.trace.rounds;
    std::cout << (r.label.empty() ? std::string("run") : "digit " + r.label) << ": " << r.result.rounds
              << " rounds";
    if (!tr.empty())
      std::cout << ", e* " << wbary::format_double(tr.back().e_star) << ", consensus "
                << wbary::format_double(tr.back().consensus_norm);
    std::cout << ", " << wbary::format_double(r.wall_seconds) << " s -> " << r.directory.string() << '\n';
  }
  return 0;
}

int cmd_graph_gen(const std::vector<std::string>& args) {
  if (args.size() < 3 || args.size() > 5) throw CLI::ValidationError("graph-gen", "expects <kind> <m> [p] [seed] <out>");
  const auto kind = wbary::parse_graph_kind(args[0]);
  const auto m = std::stol(args[1]);
  std::optional<double> p;
  std::uint64_t seed = 1;
  if (args.size() >= 4) p = std::stod(args[2]);
  if (args.size() == 5) seed = std::stoull(args[3]);
  const auto graph = wbary::generate_graph(kind, m, p, seed);
  std::ofstream out(args.back());
  if (!out) throw wbary::Error(wbary::ErrorCode::IoError, "cannot write " + args.back());
  wbary::write_edge_list(graph, out);
  std::cout << wbary::to_string(kind) << ": " << graph.size() << " nodes, " << graph.edge_count() << " edges";
  if (graph.bridges() > 0) std::cout << " (" << graph.bridges() << " bridging edges)";
  std::cout << '\n';
  return 0;
}

int cmd_idx_dump(const std::string& path, wbary::Index show) {
  const auto images = wbary::load_idx(path);
  std::cout << images.size() << " images";
  if (!images.empty()) std::cout << " of " << images.front().rows() << "x" << images.front().cols();
  std::cout << '\n';
  static const char* shades = " .:-=+*#%@";
  for (wbary::Index k = 0; k < std::min<wbary::Index>(show, wbary::Index(images.size())); ++k) {
    const auto& img = images[std::size_t(k)];
    std::cout << "image " << k << " (mass " << wbary::format_double(img.sum()) << ")\n";
    for (wbary::Index r = 0; r < img.rows(); ++r) {
      for (wbary::Index c = 0; c < img.cols(); ++c) std::cout << shades[std::min(9L, long(img(r, c) / 25.6))];
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Wasserstein barycenters"};
  app.require_subcommand(1);

  std::string config_path, preset, output;
  std::optional<wbary::Index> rounds;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run an experiment from a key = value config");
  run->add_option("config", config_path, "Config file");
  run->add_option("--preset", preset, "Named preset applied over the config")
      ->check(CLI::IsMember(wbary::preset_names()));
  run->add_option("--rounds", rounds, "Round budget override");
  run->add_option("--seed", seed, "Seed override");
  run->add_option("--output", output, "Output directory override");

  std::vector<std::string> graph_args;
  auto* graph = app.add_subcommand("graph-gen", "Write a generated graph as an edge list");
  graph->add_option("args", graph_args, "<kind> <m> [p] [seed] <out>")->required()->expected(3, 5);

  std::string idx_path;
  wbary::Index show = 0;
  auto* dump = app.add_subcommand("idx-dump", "Describe an IDX image file");
  dump->add_option("path", idx_path)->required();
  dump->add_option("--show", show, "Print the first K images as ASCII art");

  std::string synth_images, synth_labels;
  wbary::Index synth_count = 10;
  std::uint64_t synth_seed = 1;
  auto* synth = app.add_subcommand("synth-idx", "Write procedural digit glyphs as IDX images and labels");
  synth->add_option("images", synth_images)->required();
  synth->add_option("labels", synth_labels)->required();
  synth->add_option("--count", synth_count, "Glyphs per digit");
  synth->add_option("--seed", synth_seed);

  auto* presets = app.add_subcommand("preset", "Print a preset's config lines");
  std::string preset_name;
  presets->add_option("name", preset_name)->required()->check(CLI::IsMember(wbary::preset_names()));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (config_path.empty() && preset.empty()) throw CLI::ValidationError("run", "needs a config or --preset");
      return cmd_run(config_path, preset, rounds, seed, output);
    }
    if (*graph) return cmd_graph_gen(graph_args);
    if (*dump) return cmd_idx_dump(idx_path, show);
    if (*synth) {
      const auto set = wbary::synthetic_digits(synth_count, synth_seed);
      wbary::save_idx(set.images, synth_images);
      wbary::save_idx_labels(set.labels, synth_labels);
      std::cout << set.images.size() << " glyphs written\n";
      return 0;
    }
    if (*presets) {
      std::cout << wbary::preset_text(preset_name);
      return 0;
    }
  } catch (const wbary::Error& e) {
    std::cerr << "error (" << wbary::to_string(e.code()) << "): " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
