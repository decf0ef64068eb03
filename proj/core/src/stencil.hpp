#pragma once

#include <array>

#include "pconf/grid.hpp"

namespace pconf::detail {

// One entry of a radial difference row: the value at ring `ring`, angular index shifted
// by half a turn when `antipodal` is set (the reflection through the origin on the disk).
struct RadialEntry {
  int ring;
  bool antipodal;
  double coef;  // in units of 1 / dr
};

struct RadialRow {
  std::array<RadialEntry, 3> entries;
  int size;
};

RadialRow radial_row(const DiskGrid& grid, int i, RadialStencil stencil);

}  // namespace pconf::detail
