// Refines one synthetic scene with each fusion strategy and prints how many
// pixels each one changes, plus mIoU of the dense label against the result.

#include <iostream>

#include "maskrefine/maskrefine.hpp"

using namespace maskrefine;

int main() {
  const ClassRegistry reg = cityscapes_registry();
  const auto scene = synthetic::make_scene({512, 256}, 60, 3);

  const LabelMap sam = paint_sgml(scene.masks, scene.uda, reg);
  for (int strategy : {1, 2, 3}) {
    const LabelMap out = refine(reg, scene.uda, scene.masks, &scene.conf, strategy);
    std::size_t changed = 0;
    for (std::size_t p = 0; p < out.pixels(); ++p) changed += out[p] != scene.uda[p];
    const auto m = miou(confusion(scene.uda, out, reg));
    std::cout << "strategy " << strategy << ": " << changed << " pixels changed, mIoU(uda vs refined) "
              << (m ? *m : 0.0) << '\n';
  }
  std::size_t covered = 0;
  for (ClassId v : sam.data()) covered += v != reg.void_id;
  std::cout << scene.masks.count() << " masks cover " << covered << " of " << sam.pixels() << " pixels\n";
}
