#pragma once

#include "collrf/analytic.hpp"

namespace collrf {

/// Plot-ready data for the published figures: 1 (N=2), 2 (N=3), 3 (N=5).
struct FigureData {
  int which = 1;
  LineSpectrum lines;
  SampledSpectrum scaled;  // S(x) / N^2 on the default grid
};

FigureData figure_data(int which);
SystemParams figure_params(int which);

}  // namespace collrf
