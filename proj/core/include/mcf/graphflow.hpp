#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mcf/fields.hpp"

namespace mcf {

class CflError : public std::invalid_argument {
 public:
  CflError(double dt, double limit);
  double dt;
  double limit;
};

class SchemeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dirichlet approximation: u = L on |x| >= R, initial datum min_eps{mollified u0, L}.
struct CappedProblem {
  GraphField u0;
  double L = 0.0;
  double eps = 0.0;
  double R = 0.0;
  double T = 0.0;
  std::optional<double> fixed_dt;  // Auto policy when empty
};

struct CapSpec {
  double L = 0.0;
  double R = 0.0;
};

// Nodes held at the cap value (|x| >= R).
Mask cap_ring(const GridSpec& g, double R);

// min_eps{mollify(u0), L} nodewise plus the Dirichlet ring.
GraphField capped_initial(const CappedProblem& p);

// Throws std::invalid_argument when eps, R or the grid are inconsistent.
void validate(const CappedProblem& p);

// Nondivergence form of graphical MCF.
// Radial1D: u_rr/(1+u_r^2) + n u_r/r, axis limit (n+1) u_rr.
// Cartesian2D: ((1+u_y^2)u_xx - 2u_x u_y u_xy + (1+u_x^2)u_yy)/(1+|Du|^2).
std::vector<double> mcf_rhs(const GraphField& u);

// Divergence-form evaluation sqrt(1+|Du|^2) div(Du/sqrt(1+|Du|^2)), used to
// cross-check mcf_rhs.
std::vector<double> mcf_rhs_divergence(const GraphField& u);

double cfl_dt(const GraphField& u);
double cfl_dt(const GridSpec& g);

// Forward Euler without boundary treatment.
GraphField step_free(const GraphField& u, double dt);

// Forward Euler, Dirichlet ring held at L, values above L clamped to L.
GraphField step(const GraphField& u, double dt, const CapSpec& cap);

using GraphSnapshotHook = std::function<void(const GraphField&)>;

GraphTrajectory solve_capped(const CappedProblem& p, int snap_every,
                             std::vector<std::string>* diagnostics = nullptr,
                             const GraphSnapshotHook& hook = {}, bool keep_snapshots = true);

struct CapSweepResult {
  std::vector<double> Ls;
  std::vector<GraphTrajectory> runs;
  // |u^{L_{i+1}} - u^{L_i}| at the probe node and time, one entry per pair.
  std::vector<double> probe_gaps;
};

CapSweepResult cap_sweep(const GraphField& u0, const std::vector<double>& Ls, double eps,
                         const std::function<double(double)>& R_of_L, double T,
                         int snap_every, std::size_t probe_node = 0, double probe_time = 0.0);

// Indicator of {u < a}. Requires a <= L - 1.
Mask domain_projection(const GraphField& u, double a, double L);

}  // namespace mcf
