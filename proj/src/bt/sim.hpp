#ifndef BT_SIM_HPP
#define BT_SIM_HPP

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "bt/models.hpp"

namespace bt {

using RhsFn = std::function<WaveState(const WaveState&)>;

// Classical 4-stage Runge-Kutta step; dt = 0 returns the state unchanged.
// Throws on non-finite results.
WaveState step_rk4(const RhsFn& rhs, const WaveState& s, double dt);

// One trajectory sample. When bracket_delta > 0 at recording time, `minus`
// and `plus` hold single-RK4-step states at t -/+ delta so time derivatives
// can be formed by centered differencing without a dense snapshot cadence.
struct Snapshot {
    double t = 0.0;
    WaveState state;
    WaveState minus, plus;
    double delta = 0.0;  // 0 = no differencing bracket stored
};

struct Trajectory {
    std::string model;
    Frame frame = Frame::SurfaceVelocity;
    double eps = 0.0;
    std::vector<Snapshot> snaps;
};

struct SimOptions {
    double dt = 0.0;       // 0 -> stability heuristic from the grid
    double snap_dt = 0.0;  // 0 -> T/50
    double bracket_delta = 0.0;
    double blowup_threshold = 10.0;
};

// Heuristic explicit-step size: 0.4 dx / (1 + eps k_max^3 dx / 3), covering
// unit-speed transport plus third-order dispersion at the dealiased cutoff.
double heuristic_dt(const Grid& g, double eps);

// Marches `rhs` from `initial` to time T, recording snapshots on the
// configured cadence. Aborts with an error naming the time when
// max|eta| exceeds the blow-up threshold.
Trajectory simulate(const RhsFn& rhs, const WaveState& initial, double T,
                    const SimOptions& opt, const std::string& model_name,
                    double eps);

// Water-waves reference dynamics: surface potential trace psi and elevation
// eta, with the Dirichlet-Neumann value supplied by the exact strip solve at
// every RK stage. d = 1.
struct ReferenceState {
    ScalarField psi;
    ScalarField eta;
};

ReferenceState reference_rhs(const ReferenceState& s, const Bathymetry& bath,
                             double eps, int nz);
ReferenceState reference_step(const ReferenceState& s, const Bathymetry& bath,
                              double eps, double dt, int nz);

// Full reference run; the recorded states carry U = grad psi in the
// potential-gradient frame.
Trajectory reference_run(const ReferenceState& initial, const Bathymetry& bath,
                         double eps, double T, double dt, int nz,
                         const SimOptions& opt);

// Applies a frame conversion to every recorded state (including the
// differencing brackets).
Trajectory map_states(const Trajectory& traj,
                      const std::function<WaveState(const WaveState&)>& map,
                      Frame new_frame, const std::string& new_model);

struct ConsistencyReport {
    std::vector<double> eps;
    std::vector<double> residual;  // sup over snapshots of the rhs defect
    double slope = 0.0;            // only when >= 3 eps values

    void write_csv(std::ostream& os) const;
};

// Largest, over bracketed snapshots, combined L2 defect between the
// differenced time derivative and the target right-hand side.
double trajectory_defect(const Trajectory& traj, const RhsFn& target_rhs);

ConsistencyReport consistency_residual(
    const std::vector<std::pair<double, Trajectory>>& family,
    const std::function<WaveState(const WaveState&, double)>& target_rhs);

// Symmetric-model solution pipeline: forward changes of variables on the
// data, a simulation of the symmetric system, approximate-inverse changes on
// every snapshot. Small regime needs a fully symmetric SmallCoeffs; the
// strong regime solves for its symmetric root internally.
Trajectory build_approximate_solution(const VectorField& v0, const ScalarField& eta0,
                                      const Bathymetry& bath, double eps,
                                      double horizon, const SmallCoeffs& sc,
                                      const SimOptions& opt);
Trajectory build_approximate_solution_strong(const VectorField& v0,
                                             const ScalarField& eta0,
                                             const Bathymetry& bath, double eps,
                                             double horizon, const SimOptions& opt);

// Binary trajectory snapshot format `BTJ1`:
//   magic "BTJ1"; u32 d; u32 n[2]; f64 length[2]; f64 eps; u32 frame;
//   u32 model-name length; model-name bytes; u32 snapshot count;
//   per snapshot: f64 t, eta samples, then d * samples of U
// (little-endian f64 throughout; differencing brackets are not serialized).
void write_btj(std::ostream& os, const Trajectory& traj);
Trajectory read_btj(std::istream& is);

// CSV diagnostics: t, l2(eta), l2(U), energy = (1/2)(l2(eta)^2 + l2(U)^2).
void write_diagnostics_csv(std::ostream& os, const Trajectory& traj);

}  // namespace bt

#endif
