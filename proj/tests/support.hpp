#pragma once

#include <cmath>
#include <functional>

#include "mcf/fields.hpp"

namespace mcf::test {

inline GraphField sample_graph(const GridSpec& g, const std::function<double(double, double)>& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto ijk = g.unindex(i);
    const double x = g.coord(0, ijk[0]), y = g.dims() > 1 ? g.coord(1, ijk[1]) : 0.0;
    v[i] = f(x, y);
  }
  return GraphField(g, std::move(v), 0.0);
}

inline LevelSetField sample_levelset(const GridSpec& g, const std::function<double(double, double, double)>& f,
                                     LevelSetLabel label = LevelSetLabel::Vtilde_boundary) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto ijk = g.unindex(i);
    double c[3] = {0, 0, 0};
    for (int a = 0; a < g.dims(); ++a) c[a] = g.coord(a, ijk[a]);
    v[i] = f(c[0], c[1], c[2]);
  }
  return LevelSetField(g, std::move(v), 0.0, label);
}

inline double clamp1(double x) { return std::fmax(-1.0, std::fmin(1.0, x)); }

}  // namespace mcf::test
