// Builds a three-class registry in code, saves it as JSON and labels a tiny
// hand-made scene with it.

#include <iostream>

#include "maskrefine/maskrefine.hpp"

using namespace maskrefine;

int main() {
  ClassRegistry reg;
  reg.classes = {{0, "ground", {90, 60, 40}}, {1, "wall", {120, 120, 120}}, {2, "lamp", {250, 220, 0}}};
  reg.large_classes = {1};
  reg.small_classes = {2};
  reg.similarity.insert(2, 1);
  reg.road_id = 0;
  reg.sidewalk_id = 0;
  reg.alpha = 0.3;
  reg.validate();
  save_registry(reg, "custom_registry.json");

  // An 8x8 wall with a lamp the dense label only partly found.
  LabelMap uda({8, 8}, 1);
  for (int y = 2; y < 6; ++y) uda.at(3, y) = 2;
  std::vector<std::uint8_t> lamp(64, 0);
  for (int y = 1; y < 7; ++y)
    for (int x = 3; x < 5; ++x) lamp[y * 8 + x] = 1;
  const MaskSet masks({8, 8}, {BinaryMask::from_bitmap<std::uint8_t>({8, 8}, lamp)});

  const auto v = vote(masks[0], uda);
  std::cout << "votes:";
  for (std::size_t i = 0; i < v.ids.size(); ++i)
    std::cout << ' ' << reg.info(v.ids[i]).name << '=' << v.counts[i];
  std::cout << "\nmajority -> " << reg.info(majority_label(v)).name
            << ", sgml -> " << reg.info(sgml_label(v, reg)).name << '\n';
}
