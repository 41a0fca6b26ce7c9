#include "wbary/experiment.hpp"
#include "wbary/baselines.hpp"
#include "wbary/simulator.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace wbary {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Gaussian: return "gaussian";
    case ExperimentKind::Images: return "images";
    case ExperimentKind::Custom: return "custom";
  }
  return "unknown";
}

const char* to_string(ReferencePolicy policy) { return policy == ReferencePolicy::Ibp ? "ibp" : "none"; }

double ExperimentConfig::effective_pixel_spacing() const {
  if (pixel_spacing > 0.0) return pixel_spacing;
  return canvas > 1 ? 1.0 / double(canvas - 1) : 1.0;
}

std::filesystem::path ExperimentConfig::effective_cache_dir() const {
  return cache_dir.empty() ? std::filesystem::path(output_dir) / "cache" : std::filesystem::path(cache_dir);
}

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view v, const std::string& key) {
  T out{};
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) config_error("bad value '" + std::string(v) + "' for " + key);
  return out;
}

bool parse_bool(std::string_view v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  config_error("bad boolean '" + std::string(v) + "' for " + key);
}

std::vector<int> parse_int_list(std::string_view v, const std::string& key) {
  std::vector<int> out;
  while (!v.empty()) {
    const auto comma = v.find(',');
    const auto item = trim(v.substr(0, comma));
    out.push_back(parse_number<int>(item, key));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

void set_key(ExperimentConfig& cfg, const std::string& key, std::string_view v) {
  const std::string s(v);
  if (key == "experiment") {
    if (v == "gaussian") cfg.experiment = ExperimentKind::Gaussian;
    else if (v == "images") cfg.experiment = ExperimentKind::Images;
    else if (v == "custom") cfg.experiment = ExperimentKind::Custom;
    else config_error("unknown experiment '" + s + "'");
  } else if (key == "m") cfg.m = parse_number<Index>(v, key);
  else if (key == "n") cfg.n = parse_number<Index>(v, key);
  else if (key == "gamma") cfg.gamma = parse_number<double>(v, key);
  else if (key == "graph") {
    try {
      cfg.graph = parse_graph_kind(s);
    } catch (const Error&) {
      config_error("unknown graph '" + s + "'");
    }
  } else if (key == "edge_prob") {
    if (v.empty()) cfg.edge_prob.reset();
    else cfg.edge_prob = parse_number<double>(v, key);
  } else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(v, key);
  else if (key == "rounds") cfg.rounds = parse_number<Index>(v, key);
  else if (key == "stop") {
    if (v == "fixed") cfg.stop = StopMode::FixedRounds;
    else if (v == "threshold") cfg.stop = StopMode::Threshold;
    else config_error("unknown stop mode '" + s + "'");
  } else if (key == "eps1") cfg.eps1 = parse_number<double>(v, key);
  else if (key == "eps2") cfg.eps2 = parse_number<double>(v, key);
  else if (key == "mu_min") cfg.mu_min = parse_number<double>(v, key);
  else if (key == "mu_max") cfg.mu_max = parse_number<double>(v, key);
  else if (key == "sigma_min") cfg.sigma_min = parse_number<double>(v, key);
  else if (key == "sigma_max") cfg.sigma_max = parse_number<double>(v, key);
  else if (key == "support_min") cfg.support_min = parse_number<double>(v, key);
  else if (key == "support_max") cfg.support_max = parse_number<double>(v, key);
  else if (key == "idx_images") cfg.idx_images = s;
  else if (key == "idx_labels") cfg.idx_labels = s;
  else if (key == "digits") cfg.digits = parse_int_list(v, key);
  else if (key == "canvas") cfg.canvas = parse_number<Index>(v, key);
  else if (key == "scale_min") cfg.scale_min = parse_number<double>(v, key);
  else if (key == "scale_max") cfg.scale_max = parse_number<double>(v, key);
  else if (key == "pixel_spacing") cfg.pixel_spacing = parse_number<double>(v, key);
  else if (key == "separable") cfg.separable = parse_bool(v, key);
  else if (key == "distributions") cfg.distributions = s;
  else if (key == "reference") {
    if (v == "ibp") cfg.reference = ReferencePolicy::Ibp;
    else if (v == "none") cfg.reference = ReferencePolicy::None;
    else config_error("unknown reference policy '" + s + "'");
  } else if (key == "cache_dir") cfg.cache_dir = s;
  else if (key == "output_dir") cfg.output_dir = s;
  else config_error("unknown key '" + key + "'");
}

std::string join(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + std::to_string(xs[i]);
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  return out;
}

}  // namespace

void apply_config_text(ExperimentConfig& cfg, std::string_view text) {
  Index line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) config_error("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    try {
      set_key(cfg, key, trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      config_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig cfg;
  apply_config_text(cfg, text);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) { return parse_config(read_text(path)); }

std::string serialize_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  auto kv = [&](const char* k, const std::string& v) { out << k << " = " << v << '\n'; };
  kv("experiment", to_string(cfg.experiment));
  kv("m", std::to_string(cfg.m));
  kv("n", std::to_string(cfg.n));
  kv("gamma", format_double(cfg.gamma));
  kv("graph", to_string(cfg.graph));
  kv("edge_prob", cfg.edge_prob ? format_double(*cfg.edge_prob) : "");
  kv("seed", std::to_string(cfg.seed));
  kv("rounds", std::to_string(cfg.rounds));
  kv("stop", cfg.stop == StopMode::Threshold ? "threshold" : "fixed");
  kv("eps1", format_double(cfg.eps1));
  kv("eps2", format_double(cfg.eps2));
  kv("mu_min", format_double(cfg.mu_min));
  kv("mu_max", format_double(cfg.mu_max));
  kv("sigma_min", format_double(cfg.sigma_min));
  kv("sigma_max", format_double(cfg.sigma_max));
  kv("support_min", format_double(cfg.support_min));
  kv("support_max", format_double(cfg.support_max));
  kv("idx_images", cfg.idx_images);
  kv("idx_labels", cfg.idx_labels);
  kv("digits", join(cfg.digits));
  kv("canvas", std::to_string(cfg.canvas));
  kv("scale_min", format_double(cfg.scale_min));
  kv("scale_max", format_double(cfg.scale_max));
  kv("pixel_spacing", format_double(cfg.pixel_spacing));
  kv("separable", cfg.separable ? "true" : "false");
  kv("distributions", cfg.distributions);
  kv("reference", to_string(cfg.reference));
  kv("cache_dir", cfg.cache_dir);
  kv("output_dir", cfg.output_dir);
  return out.str();
}

void validate_config(const ExperimentConfig& cfg) {
  auto need = [](bool ok, const char* msg) {
    if (!ok) config_error(msg);
  };
  need(cfg.m >= 1, "m must be >= 1");
  need(cfg.gamma > 0.0, "gamma must be positive");
  need(cfg.rounds >= 0, "rounds must be >= 0");
  need(cfg.eps1 > 0.0 && cfg.eps2 > 0.0, "eps1 and eps2 must be positive");
  need(cfg.stop != StopMode::Threshold || cfg.reference != ReferencePolicy::None,
       "threshold stopping needs reference = ibp");
  need((cfg.graph == GraphKind::ErdosRenyi) == cfg.edge_prob.has_value(),
       "edge_prob is required for erdos_renyi and only allowed there");
  need(!cfg.edge_prob || (*cfg.edge_prob > 0.0 && *cfg.edge_prob <= 1.0), "edge_prob must lie in (0, 1]");
  switch (cfg.experiment) {
    case ExperimentKind::Gaussian:
      need(cfg.n >= 1, "n must be >= 1");
      need(cfg.mu_min <= cfg.mu_max, "mu_min must not exceed mu_max");
      need(cfg.sigma_min > 0.0 && cfg.sigma_min <= cfg.sigma_max, "need 0 < sigma_min <= sigma_max");
      need(cfg.support_min < cfg.support_max || cfg.n == 1, "support_min must be below support_max");
      break;
    case ExperimentKind::Images:
      need(!cfg.idx_images.empty(), "idx_images is required for image experiments");
      need(cfg.digits.empty() || !cfg.idx_labels.empty(), "digits needs idx_labels");
      need(cfg.canvas >= 1, "canvas must be >= 1");
      need(cfg.scale_min > 0.0 && cfg.scale_min <= cfg.scale_max, "need 0 < scale_min <= scale_max");
      need(cfg.pixel_spacing >= 0.0, "pixel_spacing must be >= 0");
      break;
    case ExperimentKind::Custom:
      need(!cfg.distributions.empty(), "distributions is required for custom experiments");
      need(cfg.support_min < cfg.support_max, "support_min must be below support_max");
      break;
  }
}

namespace {

const std::map<std::string, std::string, std::less<>>& presets() {
  static const std::map<std::string, std::string, std::less<>> table = {
      {"gaussian-paper",
       "experiment = gaussian\nm = 50\nn = 100\ngamma = 0.1\ngraph = star\nrounds = 100000\n"
       "stop = threshold\neps1 = 1e-8\neps2 = 1e-6\nreference = ibp\n"},
      {"gaussian-desk",
       "experiment = gaussian\nm = 10\nn = 20\ngamma = 0.1\ngraph = complete\nrounds = 2000\n"
       "stop = fixed\nreference = ibp\n"},
      {"mnist-paper",
       "experiment = images\nm = 1000\ncanvas = 56\nscale_min = 0.5\nscale_max = 2\ngamma = 0.01\n"
       "graph = erdos_renyi\nedge_prob = 0.004\nrounds = 300\nstop = fixed\nreference = none\n"},
      {"mnist-desk",
       "experiment = images\nm = 50\ncanvas = 28\nscale_min = 0.25\nscale_max = 1\ngamma = 0.01\n"
       "graph = erdos_renyi\nedge_prob = 0.08\nrounds = 300\nstop = fixed\nreference = none\n"},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : presets()) out.push_back(name);
  return out;
}

std::string preset_text(std::string_view name) {
  const auto it = presets().find(name);
  if (it == presets().end()) config_error("unknown preset '" + std::string(name) + "'");
  return it->second;
}

NetworkGraph build_graph(const ExperimentConfig& cfg) {
  validate_config(cfg);
  return generate_graph(cfg.graph, cfg.m, cfg.edge_prob, cfg.seed);
}

namespace {

std::mt19937_64 input_rng(const ExperimentConfig& cfg, std::uint64_t stream) {
  std::seed_seq seq{std::uint32_t(cfg.seed), std::uint32_t(cfg.seed >> 32), std::uint32_t(stream), 0x5eedu};
  return std::mt19937_64(seq);
}

Kernel make_kernel(const ExperimentConfig& cfg, const SupportGrid<double>& grid) {
  if (cfg.separable && grid.lattice_shape()) return build_separable_kernel(grid, cfg.gamma);
  return build_kernel(euclidean_cost_matrix(grid), cfg.gamma);
}

Problem gaussian_problem(const ExperimentConfig& cfg) {
  Problem p;
  p.grid = SupportGrid<double>::equispaced(cfg.support_min, cfg.support_max, cfg.n);
  auto rng = input_rng(cfg, 0);
  std::uniform_real_distribution<double> mu(cfg.mu_min, cfg.mu_max), sigma(cfg.sigma_min, cfg.sigma_max);
  for (Index i = 0; i < cfg.m; ++i) {
    const double mi = mu(rng);
    const double si = sigma(rng);
    p.q_list.push_back(discretize_truncated_gaussian(mi, si, p.grid));
  }
  p.kernel = make_kernel(cfg, p.grid);
  return p;
}

Problem custom_problem(const ExperimentConfig& cfg) {
  std::istringstream in(read_text(cfg.distributions));
  std::vector<Eigen::VectorXd> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::vector<double> values;
    std::string_view rest = body;
    while (true) {
      const auto comma = rest.find(',');
      values.push_back(parse_number<double>(trim(rest.substr(0, comma)), "distributions"));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(Eigen::Map<Eigen::VectorXd>(values.data(), Index(values.size())));
  }
  if (Index(rows.size()) != cfg.m)
    config_error("distributions file has " + std::to_string(rows.size()) + " rows, m = " + std::to_string(cfg.m));
  Problem p;
  const Index n = rows.front().size();
  p.grid = SupportGrid<double>::equispaced(cfg.support_min, cfg.support_max, n);
  for (auto& r : rows) {
    if (r.size() != n) config_error("distributions rows differ in length");
    if ((r.array() < 0.0).any() || !(r.sum() > 0.0)) config_error("distributions rows need nonnegative mass");
    p.q_list.emplace_back(r / r.sum());
  }
  p.kernel = make_kernel(cfg, p.grid);
  return p;
}

std::vector<Problem> image_problems(const ExperimentConfig& cfg) {
  const auto images = load_idx(cfg.idx_images);
  if (images.empty()) config_error("idx file holds no images");
  std::vector<std::uint8_t> labels;
  if (!cfg.idx_labels.empty()) {
    labels = load_idx_labels(cfg.idx_labels);
    if (labels.size() != images.size()) config_error("image and label counts differ");
  }

  // Groups of image indices, one problem each.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  if (labels.empty()) {
    std::vector<std::size_t> all(images.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    groups.emplace_back("", std::move(all));
  } else {
    std::vector<int> digits = cfg.digits;
    if (digits.empty()) {
      const std::set<int> present(labels.begin(), labels.end());
      digits.assign(present.begin(), present.end());
    }
    for (int d : digits) {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == d) idx.push_back(i);
      if (idx.empty()) config_error("no images with label " + std::to_string(d));
      groups.emplace_back(std::to_string(d), std::move(idx));
    }
  }

  const double spacing = cfg.effective_pixel_spacing();
  const auto grid = SupportGrid<double>::lattice(cfg.canvas, cfg.canvas, spacing);
  const Kernel kernel = make_kernel(cfg, grid);

  std::vector<Problem> out;
  for (auto& [label, idx] : groups) {
    auto rng = input_rng(cfg, 1 + (label.empty() ? 0 : std::uint64_t(std::stoi(label)) + 1));
    std::shuffle(idx.begin(), idx.end(), rng);
    std::uniform_real_distribution<double> scale_draw(cfg.scale_min, cfg.scale_max);
    Problem p{label, {}, grid, kernel};
    for (Index i = 0; i < cfg.m; ++i) {
      const auto& img = images[idx[std::size_t(i) % idx.size()]];
      const double scale = scale_draw(rng);
      const Index h = std::max<Index>(1, std::lround(double(img.rows()) * scale));
      const Index w = std::max<Index>(1, std::lround(double(img.cols()) * scale));
      if (h > cfg.canvas || w > cfg.canvas)
        config_error("scale " + format_double(scale) + " does not fit the " + std::to_string(cfg.canvas) + " canvas");
      const PixelOffset off{std::uniform_int_distribution<Index>(0, cfg.canvas - h)(rng),
                            std::uniform_int_distribution<Index>(0, cfg.canvas - w)(rng)};
      p.q_list.push_back(image_to_distribution(preprocess_image(img, scale, off, cfg.canvas, cfg.canvas), spacing).first);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

std::vector<Problem> build_problems(const ExperimentConfig& cfg) {
  validate_config(cfg);
  switch (cfg.experiment) {
    case ExperimentKind::Gaussian: return {gaussian_problem(cfg)};
    case ExperimentKind::Custom: return {custom_problem(cfg)};
    case ExperimentKind::Images: return image_problems(cfg);
  }
  return {};
}

std::uint64_t problem_hash(const ExperimentConfig& cfg, std::string_view label) {
  ExperimentConfig key = cfg;
  // Fields that do not change the inputs or the optimum.
  key.graph = GraphKind::Complete;
  key.edge_prob.reset();
  key.rounds = 0;
  key.stop = StopMode::FixedRounds;
  key.eps1 = key.eps2 = 1.0;
  key.reference = ReferencePolicy::Ibp;
  key.cache_dir.clear();
  key.output_dir.clear();
  const std::string text = serialize_config(key) + "label = " + std::string(label) + '\n';
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double cached_reference_optimum(const ExperimentConfig& cfg, const Problem& problem) {
  std::array<char, 17> hex{};
  std::snprintf(hex.data(), hex.size(), "%016llx", static_cast<unsigned long long>(problem_hash(cfg, problem.label)));
  const auto dir = cfg.effective_cache_dir();
  const auto file = dir / ("reference-" + std::string(hex.data()) + ".txt");
  if (std::filesystem::exists(file)) {
    const auto text = read_text(file);
    return parse_number<double>(trim(text), file.string());
  }
  const double value = reference_dual_optimum(problem.q_list, problem.kernel);
  std::filesystem::create_directories(dir);
  open_out(file) << format_double(value) << '\n';
  return value;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentReport report{build_graph(cfg), {}};
  const auto problems = build_problems(cfg);
  for (const auto& problem : problems) {
    RunReport run_report;
    run_report.label = problem.label;
    run_report.directory = std::filesystem::path(cfg.output_dir);
    if (!problem.label.empty()) run_report.directory /= "digit" + problem.label;
    std::filesystem::create_directories(run_report.directory);

    RunOptions opts;
    opts.rounds = cfg.rounds;
    opts.stop = cfg.stop;
    opts.eps1 = cfg.eps1;
    opts.eps2 = cfg.eps2;
    if (cfg.reference == ReferencePolicy::Ibp) opts.reference_optimum = cached_reference_optimum(cfg, problem);
    run_report.reference_optimum = opts.reference_optimum;

    const auto start = std::chrono::steady_clock::now();
    run_report.result = run(problem.q_list, report.graph, problem.kernel, opts);
    run_report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const auto& res = run_report.result;
    {
      auto out = open_out(run_report.directory / "trace.csv");
      write_trace_csv(res.trace, out);
    }
    const bool image = problem.grid.lattice_shape().has_value();
    for (Index i = 0; i < cfg.m; ++i) {
      const Distribution b(res.p_star.col(i), 1e-9);
      const auto stem = run_report.directory / ("barycenter_agent" + std::to_string(i));
      if (image) {
        write_pgm(b, problem.grid, std::filesystem::path(stem.string() + ".pgm"));
      } else {
        auto out = open_out(stem.string() + ".csv");
        write_weights_csv(b, out);
      }
    }

    auto summary = open_out(run_report.directory / "summary.txt");
    const auto& last = res.trace.rounds;
    auto kv = [&](const char* k, const std::string& v) { summary << k << " = " << v << '\n'; };
    kv("label", problem.label);
    kv("rounds", std::to_string(res.rounds));
    kv("final_e_star", last.empty() ? "nan" : format_double(last.back().e_star));
    kv("final_consensus_norm", last.empty() ? "nan" : format_double(last.back().consensus_norm));
    kv("final_dual_value", last.empty() ? format_double(res.trace.initial_dual_value)
                                        : format_double(last.back().dual_value));
    kv("thresholds_met", res.trace.thresholds_met ? "true" : "false");
    kv("reference_optimum", opts.reference_optimum ? format_double(*opts.reference_optimum) : "none");
    kv("max_gradient_norm", format_double(res.trace.max_gradient_norm));
    kv("dual_radius", format_double(res.dual_radius()));
    kv("wall_seconds", format_double(run_report.wall_seconds));
    kv("graph", to_string(cfg.graph));
    kv("edges", std::to_string(report.graph.edge_count()));
    kv("graph_resamples", std::to_string(report.graph.resamples()));
    kv("graph_bridges", std::to_string(report.graph.bridges()));
    report.runs.push_back(std::move(run_report));
  }
  return report;
}

namespace {

struct Pt {
  double x, y;
};

using Stroke = std::vector<Pt>;

Stroke ellipse(double cx, double cy, double rx, double ry, double from = 0.0, double to = 2.0 * M_PI) {
  Stroke s;
  const int steps = 20;
  for (int k = 0; k <= steps; ++k) {
    const double t = from + (to - from) * k / steps;
    s.push_back({cx + rx * std::cos(t), cy + ry * std::sin(t)});
  }
  return s;
}

std::vector<Stroke> glyph(int digit) {
  switch (digit) {
    case 0: return {ellipse(0.5, 0.5, 0.35, 0.48)};
    case 1: return {{{0.3, 0.2}, {0.55, 0.0}, {0.55, 1.0}}};
    case 2: return {{{0.15, 0.25}, {0.3, 0.04}, {0.7, 0.04}, {0.85, 0.25}, {0.8, 0.45}, {0.15, 1.0}, {0.9, 1.0}}};
    case 3: return {{{0.15, 0.05}, {0.85, 0.05}, {0.45, 0.42}, {0.8, 0.58}, {0.82, 0.85}, {0.55, 1.0}, {0.15, 0.93}}};
    case 4: return {{{0.68, 1.0}, {0.68, 0.0}, {0.1, 0.68}, {0.92, 0.68}}};
    case 5:
      return {{{0.85, 0.0}, {0.22, 0.0}, {0.17, 0.45}, {0.6, 0.4}, {0.85, 0.6}, {0.8, 0.9}, {0.5, 1.0}, {0.15, 0.9}}};
    case 6:
      return {{{0.75, 0.0}, {0.3, 0.35}, {0.15, 0.7}, {0.3, 1.0}, {0.7, 1.0}, {0.85, 0.75}, {0.65, 0.5}, {0.3, 0.55},
               {0.15, 0.7}}};
    case 7: return {{{0.1, 0.0}, {0.9, 0.0}, {0.4, 1.0}}};
    case 8: return {ellipse(0.5, 0.24, 0.25, 0.24), ellipse(0.5, 0.73, 0.31, 0.27)};
    case 9: return {ellipse(0.48, 0.28, 0.3, 0.28), {{0.78, 0.28}, {0.72, 1.0}}};
  }
  throw Error(ErrorCode::InvalidParameter, "glyph digit must be 0..9");
}

double segment_distance(Pt p, Pt a, Pt b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  const double t = len2 > 0 ? std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0) : 0.0;
  const double dx = p.x - (a.x + t * vx), dy = p.y - (a.y + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

GlyphSet synthetic_digits(Index count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::InvalidParameter, "need at least one glyph per digit");
  std::mt19937_64 rng(seed);
  auto u = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  GlyphSet set;
  for (int d = 0; d < 10; ++d)
    for (Index k = 0; k < count; ++k) {
      const double slant = u(-0.25, 0.25), width = u(11.0, 16.0), height = u(18.0, 20.0);
      const double cx = 14.0 + u(-1.5, 1.5), cy = 14.0 + u(-1.0, 1.0), thick = u(1.0, 2.0);
      std::vector<Stroke> strokes = glyph(d);
      for (auto& s : strokes)
        for (auto& p : s) {
          const double x = p.x + u(-0.03, 0.03), y = p.y + u(-0.03, 0.03);
          p = {cx + (x - 0.5) * width + slant * (0.5 - y) * height, cy + (y - 0.5) * height};
        }
      Eigen::MatrixXd img = Eigen::MatrixXd::Zero(28, 28);
      for (Index r = 0; r < 28; ++r)
        for (Index c = 0; c < 28; ++c) {
          const Pt px{double(c) + 0.5, double(r) + 0.5};
          double dist = 1e9;
          for (const auto& s : strokes)
            for (std::size_t j = 1; j < s.size(); ++j) dist = std::min(dist, segment_distance(px, s[j - 1], s[j]));
          img(r, c) = std::round(255.0 * std::clamp(thick + 0.5 - dist, 0.0, 1.0));
        }
      set.images.push_back(std::move(img));
      set.labels.push_back(std::uint8_t(d));
    }
  return set;
}

}  // namespace wbary
