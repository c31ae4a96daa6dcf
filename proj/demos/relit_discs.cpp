// Finds coloured discs in a darkened copy of a scene using a probe cut from
// the bright original, then writes both images and the match overlay.
//
//   relit_discs [out_dir]

#include <filesystem>
#include <iostream>

#include "asplund/asplund.hpp"

int main(int argc, char** argv) {
  using namespace asplund;
  const std::filesystem::path dir = argc > 1 ? argv[1] : ".";

  DiscSceneSpec spec;
  spec.count = 4;
  spec.distractors = 3;
  spec.seed = 11;
  const Scene bright = gen_discs(spec);
  const Probe probe(bright.probe_image());
  const MultichannelImage dark = global_relight(bright.image, 3.0);

  const DistanceMap map = distance_map(dark, probe);
  const MatchSet found = extract_matches(map, MatchOptions{0.05, probe.width(), 0.0}, ProbeShape::of(probe));

  std::cout << "ground truth:";
  for (Pixel p : bright.ground_truth) std::cout << " (" << p.x << "," << p.y << ")";
  std::cout << "\n" << format_match_set(found);

  save_image(bright.image, (dir / "bright.png").string());
  save_image(dark, (dir / "dark.png").string());
  save_image(overlay(dark, found), (dir / "dark_matches.png").string());
  save_map_preview(map, (dir / "dark_map.png").string());
  return 0;
}
