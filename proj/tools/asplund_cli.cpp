// asplund: command-line front end for LIP Asplund distances, maps and matches.
//
// Exit codes: 0 success, 2 usage or validation error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "asplund/asplund.hpp"

namespace {

using namespace asplund;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct GlobalOptions {
  double m = 256.0;
  double v_min = 1.0;
  std::optional<double> v_max;

  GrayScaleParams params() const { return GrayScaleParams(m, v_min, v_max); }
};

std::vector<int> parse_ints(const std::string& text, std::size_t count, const char* what) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": expected integers, got '" + text + "'");
    }
  }
  if (out.size() != count) {
    throw UsageError(std::string(what) + ": expected " + std::to_string(count) + " comma-separated values");
  }
  return out;
}

std::vector<double> parse_reals(const std::string& text, std::size_t count, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": expected numbers, got '" + text + "'");
    }
  }
  if (out.size() != count) {
    throw UsageError(std::string(what) + ": expected " + std::to_string(count) + " comma-separated values");
  }
  return out;
}

unsigned threads_from_env() {
  const char* env = std::getenv("ASPLUND_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0) throw UsageError("ASPLUND_THREADS must be a non-negative integer");
  return static_cast<unsigned>(v);
}

std::string fixed6(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

// ---------------------------------------------------------------- dist

struct DistArgs {
  std::string image;
  std::string probe;
  std::string region;
  std::optional<double> tolerance;
  std::string agg = "eq6";
};

int run_dist(const GlobalOptions& g, const DistArgs& a) {
  const GrayScaleParams params = g.params();
  const MultichannelImage image = load_image(a.image, params);
  const MultichannelImage probe = load_image(a.probe, params);
  if (image.channels() != probe.channels()) throw UsageError("dist: image and probe channel counts differ");

  Rect rect{0, 0, std::min(image.width(), probe.width()), std::min(image.height(), probe.height())};
  if (!a.region.empty()) {
    const auto v = parse_ints(a.region, 4, "--region");
    rect = {v[0], v[1], v[2], v[3]};
    if (rect.empty() || rect.x < 0 || rect.y < 0 ||
        rect.x + rect.width > std::min(image.width(), probe.width()) ||
        rect.y + rect.height > std::min(image.height(), probe.height())) {
      throw UsageError("dist: region does not lie inside both images");
    }
  }
  const Region region = Region::rect(rect);
  const std::optional<ToleranceSpec> tol =
      a.tolerance ? std::optional<ToleranceSpec>(ToleranceSpec(*a.tolerance)) : std::nullopt;

  if (a.agg == "d1" || a.agg == "dinf") {
    if (tol && tol->kept() < 1.0) throw UsageError("dist: --tolerance applies to --agg eq6 only");
    const double d = a.agg == "d1" ? d1_region(probe, image, region) : dinf_region(probe, image, region);
    std::cout << "d=" << fixed6(d) << "\n";
    return kExitOk;
  }
  if (a.agg != "eq6") throw UsageError("dist: --agg must be eq6, d1 or dinf");

  const ColorDistance plain = color_region_distance(probe, image, region);
  std::cout << "d=" << fixed6(plain.distance) << " mu=" << fixed6(plain.bounds.mu)
            << " lambda=" << fixed6(plain.bounds.lambda);
  if (tol && tol->kept() < 1.0) {
    const TolerantDistance t = tolerance_region_distance(probe, image, region, *tol);
    std::cout << " d_tol=" << fixed6(t.distance) << " mu_tol=" << fixed6(t.bounds.mu)
              << " lambda_tol=" << fixed6(t.bounds.lambda) << " discarded=" << t.discarded.size();
  }
  std::cout << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- map

struct MapArgs {
  std::string image;
  std::string probe;
  std::string out;
  std::optional<double> tolerance;
  std::string preview;
};

DistanceMap compute_map(const MultichannelImage& image, const Probe& probe,
                        const std::optional<double>& tolerance) {
  const MapOptions opts{threads_from_env()};
  if (tolerance) {
    const ToleranceSpec tol(*tolerance);
    if (tol.kept() < 1.0) return distance_map_tol(image, probe, tol, opts);
  }
  return distance_map(image, probe, opts);
}

int run_map(const GlobalOptions& g, const MapArgs& a) {
  const GrayScaleParams params = g.params();
  const MultichannelImage image = load_image(a.image, params);
  const Probe probe(load_image(a.probe, params));
  const DistanceMap map = compute_map(image, probe, a.tolerance);
  save_map(map, a.out);
  if (!a.preview.empty()) save_map_preview(map, a.preview);
  return kExitOk;
}

// ---------------------------------------------------------------- match

struct MatchArgs {
  std::string image;
  std::string probe;
  std::optional<double> tolerance;
  double h = 0.0;
  double score_max = std::numeric_limits<double>::infinity();
  int min_sep = 0;
  std::string overlay_path;
};

int run_match(const GlobalOptions& g, const MatchArgs& a) {
  const GrayScaleParams params = g.params();
  const MultichannelImage image = load_image(a.image, params);
  const Probe probe(load_image(a.probe, params));
  const DistanceMap map = compute_map(image, probe, a.tolerance);
  const MatchSet set =
      extract_matches(map, MatchOptions{a.score_max, a.min_sep, a.h}, ProbeShape::of(probe));
  std::cout << format_match_set(set);
  if (!a.overlay_path.empty()) save_image(overlay(image, set), a.overlay_path);
  return kExitOk;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string kind;
  std::string out;
  std::uint64_t seed = 0;
  std::string truth;
  std::string probe;
  BrickSceneSpec bricks;
  DiscSceneSpec discs;
};

int run_synth(const GlobalOptions& g, const SynthArgs& a) {
  const GrayScaleParams params = g.params();
  Scene scene;
  if (a.kind == "bricks") {
    BrickSceneSpec spec = a.bricks;
    spec.seed = a.seed;
    scene = gen_bricks(spec, params);
  } else if (a.kind == "discs") {
    DiscSceneSpec spec = a.discs;
    spec.seed = a.seed;
    scene = gen_discs(spec, params);
  } else {
    throw UsageError("synth: kind must be bricks or discs");
  }
  save_image(scene.image, a.out);
  if (!a.probe.empty()) save_image(scene.probe_image(), a.probe);
  if (!a.truth.empty()) {
    MatchSet truth;
    truth.probe = {scene.probe_rect.width, scene.probe_rect.height,
                   {(scene.probe_rect.width - 1) / 2, (scene.probe_rect.height - 1) / 2}};
    for (Pixel p : scene.ground_truth) truth.matches.push_back({p, 0.0});
    std::ofstream os(a.truth);
    if (!os) throw IoError("cannot open '" + a.truth + "' for writing");
    os << format_match_set(truth);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string in;
  std::string out;
  std::optional<double> relight;
  std::string drift;
  std::string drift_axis = "vertical";
  double noise_density = 0.0;
  double noise_variance = 2.6;
  std::uint64_t seed = 0;
};

int run_perturb(const GlobalOptions& g, const PerturbArgs& a) {
  MultichannelImage img = load_image(a.in, g.params());
  if (a.relight) img = global_relight(img, *a.relight);
  if (!a.drift.empty()) {
    const auto v = parse_reals(a.drift, 2, "--drift");
    DriftSpec spec{DriftAxis::Vertical, v[0], v[1]};
    if (a.drift_axis == "horizontal") {
      spec.axis = DriftAxis::Horizontal;
    } else if (a.drift_axis != "vertical") {
      throw UsageError("--drift-axis must be vertical or horizontal");
    }
    img = apply_drift(img, spec);
  }
  if (a.noise_density > 0.0) img = add_noise(img, NoiseSpec{a.noise_variance, a.noise_density, a.seed});
  save_image(img, a.out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LIP Asplund distances, distance maps and template matches"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--M", global.m, "Grey-scale bound M")->capture_default_str();
  app.add_option("--vmin", global.v_min, "Clamp floor applied before LIP logarithms")->capture_default_str();
  app.add_option("--vmax", global.v_max, "Clamp ceiling (default M - 1)");

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Distance between an image and a probe over a region");
  dist_cmd->add_option("image", dist.image)->required();
  dist_cmd->add_option("probe", dist.probe)->required();
  dist_cmd->add_option("--region", dist.region, "x,y,w,h (default: common extent)");
  dist_cmd->add_option("--tolerance", dist.tolerance, "Fraction of pixels kept, in (0, 1]");
  dist_cmd->add_option("--agg", dist.agg, "eq6 (global), d1 (mean) or dinf (max)")->capture_default_str();

  MapArgs map;
  auto* map_cmd = app.add_subcommand("map", "Write the distance map of a probe over an image (PFM)");
  map_cmd->add_option("image", map.image)->required();
  map_cmd->add_option("probe", map.probe)->required();
  map_cmd->add_option("out", map.out)->required();
  map_cmd->add_option("--tolerance", map.tolerance, "Fraction of pixels kept, in (0, 1]");
  map_cmd->add_option("--preview", map.preview, "Also write an 8-bit PNG preview");

  MatchArgs match;
  auto* match_cmd = app.add_subcommand("match", "List match locations as 'x y score' lines");
  match_cmd->set_help_flag("--help", "Print this help message and exit");  // frees -h for --h
  match_cmd->add_option("image", match.image)->required();
  match_cmd->add_option("probe", match.probe)->required();
  match_cmd->add_option("--tolerance", match.tolerance, "Fraction of pixels kept, in (0, 1]");
  match_cmd->add_option("--h", match.h, "Minimum depth of a minimum (0: all regional minima)")->capture_default_str();
  match_cmd->add_option("--score-max", match.score_max, "Keep matches with score <= this");
  match_cmd->add_option("--min-sep", match.min_sep, "Chebyshev suppression radius in pixels")->capture_default_str();
  match_cmd->add_option("--overlay", match.overlay_path, "Write the image with match outlines");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("kind", synth.kind, "bricks or discs")->required();
  synth_cmd->add_option("out", synth.out)->required();
  synth_cmd->add_option("--seed", synth.seed)->capture_default_str();
  synth_cmd->add_option("--truth", synth.truth, "Write ground-truth anchors in match-list format");
  synth_cmd->add_option("--probe", synth.probe, "Write the canonical probe image");
  synth_cmd->add_option("--columns", synth.bricks.columns)->capture_default_str();
  synth_cmd->add_option("--rows", synth.bricks.rows)->capture_default_str();
  synth_cmd->add_option("--brick-width", synth.bricks.brick_width)->capture_default_str();
  synth_cmd->add_option("--brick-height", synth.bricks.brick_height)->capture_default_str();
  synth_cmd->add_option("--mortar", synth.bricks.mortar)->capture_default_str();
  synth_cmd->add_option("--jitter", synth.bricks.shade_jitter, "Per-brick LIP shade jitter")->capture_default_str();
  synth_cmd->add_option("--width", synth.discs.width)->capture_default_str();
  synth_cmd->add_option("--height", synth.discs.height)->capture_default_str();
  synth_cmd->add_option("--radius", synth.discs.radius)->capture_default_str();
  synth_cmd->add_option("--padding", synth.discs.padding)->capture_default_str();
  synth_cmd->add_option("--count", synth.discs.count)->capture_default_str();
  synth_cmd->add_option("--distractors", synth.discs.distractors)->capture_default_str();

  PerturbArgs perturb;
  auto* perturb_cmd = app.add_subcommand("perturb", "Relight, drift and/or add noise to an image");
  perturb_cmd->add_option("in", perturb.in)->required();
  perturb_cmd->add_option("out", perturb.out)->required();
  perturb_cmd->add_option("--relight", perturb.relight, "Global LIP multiplier (>1 darkens)");
  perturb_cmd->add_option("--drift", perturb.drift, "start,end LIP multipliers across the axis");
  perturb_cmd->add_option("--drift-axis", perturb.drift_axis, "vertical or horizontal")->capture_default_str();
  perturb_cmd->add_option("--noise-density", perturb.noise_density, "Fraction of pixels hit")->capture_default_str();
  perturb_cmd->add_option("--noise-variance", perturb.noise_variance, "Variance on the [0, 1] scale")->capture_default_str();
  perturb_cmd->add_option("--seed", perturb.seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*dist_cmd) return run_dist(global, dist);
    if (*map_cmd) return run_map(global, map);
    if (*match_cmd) return run_match(global, match);
    if (*synth_cmd) return run_synth(global, synth);
    if (*perturb_cmd) return run_perturb(global, perturb);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
