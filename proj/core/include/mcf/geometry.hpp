#pragma once

#include <vector>

#include "mcf/fields.hpp"

namespace mcf {

// Pointwise quantities of a graph. Nodes whose stencil touches ESCAPED hold ESCAPED.
struct GraphGeometry {
  std::vector<double> v;
  std::vector<double> H;
  std::vector<double> A2;
  std::vector<double> G;
  Mask G_valid;
  double k_used = 0.0;
};

struct MollifierSpec {
  double epsilon = 0.0;
  double kernel_radius = 0.0;
};

// Graph fields live on Radial1D (u(r) on R^{n+1}) or Cartesian2D grids.
std::vector<double> gradient_function(const GraphField& u);
std::vector<double> mean_curvature(const GraphField& u);
std::vector<double> second_fundamental_norm(const GraphField& u);

struct GQuantity {
  std::vector<double> values;
  Mask valid;
};

// G = v^2 / (1 - k v^2) |A|^2, valid only where k v^2 <= 1/2.
GQuantity g_quantity(const GraphField& u, double k);

GraphGeometry graph_geometry(const GraphField& u, double k);

// C^2 nondecreasing replacement for min{x, 0}; polynomial on (-1, 1).
double smooth_min_profile(double x);
double smooth_min_profile_derivative(double x);

// eps * f((a - b) / eps) + b; b when a is ESCAPED.
double mollified_min(double a, double b, double eps);

// Bump-kernel convolution of radius eps. ESCAPED nodes are read as
// `escaped_fill`. Returns u0 unchanged when eps < h.
GraphField mollify_initial(const GraphField& u0, const MollifierSpec& spec, double escaped_fill);
GraphField mollify_initial(const GraphField& u0, double eps, double escaped_fill);

// exp(-1 / (1 - s^2)) for |s| < 1, else 0.
double bump_kernel(double s);

}  // namespace mcf
