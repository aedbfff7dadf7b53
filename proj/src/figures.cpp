#include "collrf/figures.hpp"

#include <string>

#include "collrf/errors.hpp"

namespace collrf {

SystemParams figure_params(int which) {
  // captions: 2 Omega = 100 gamma, delta / (2 Omega) = 0.2 (Figs. 1, 2);
  //           2 Omega = 200 gamma, delta / (2 Omega) = 0.3 (Fig. 3)
  switch (which) {
    case 1: return make_params(2, 50.0, 0.2 * 100.0, 0.0);
    case 2: return make_params(3, 50.0, 0.2 * 100.0, 0.0);
    case 3: return make_params(5, 100.0, 0.3 * 200.0, 0.0);
    default: throw InvalidInput("unknown figure " + std::to_string(which) + " (expected 1, 2 or 3)");
  }
}

FigureData figure_data(int which) {
  FigureData out;
  out.which = which;
  out.lines = general_lines(figure_params(which));
  const auto grid = default_grid(out.lines.params);
  out.scaled = evaluate_spectrum(out.lines.lines, grid);
  const double n2 = static_cast<double>(out.lines.params.n_emitters * out.lines.params.n_emitters);
  for (double& v : out.scaled.values) v /= n2;
  return out;
}

}  // namespace collrf
