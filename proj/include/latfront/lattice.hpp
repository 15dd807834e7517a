#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "latfront/media.hpp"

namespace latfront {

enum class LeftBoundary { Copy, Fixed, HomogeneousTracker };
enum class RightBoundary { Zero, Geometric };

/// Truncated lattice window. Site k stores u at index offset+k, physical
/// coordinate x = (offset+k)/m. m = 1 is the integer lattice; m > 1 samples
/// the space-continuous variant on spacing 1/m with the unit-shift coupling
/// applied m cells away.
struct LatticeState {
    long offset = 0;
    int m = 1;
    double time = 0.0;
    double sup_bound = 1.0;  // invariant cap max(1, ||u0||)
    std::vector<double> u;

    std::size_t size() const { return u.size(); }
    double x_of(std::size_t k) const { return static_cast<double>(offset + static_cast<long>(k)) / m; }
    double x_left() const { return static_cast<double>(offset) / m; }
    double x_right() const { return static_cast<double>(offset + static_cast<long>(u.size()) - 1) / m; }
};

struct SimConfig {
    double dt = 0.0;  // 0 = stability heuristic min(0.1, 0.2/(4 + a_max*max(1,||u0||)))
    LeftBoundary left = LeftBoundary::Copy;
    double left_value = 0.0;        // Fixed boundary value
    double tracker_u0 = 0.0;        // HomogeneousTracker reference (must be > 0)
    RightBoundary right = RightBoundary::Geometric;
    double record_dt = 1.0;
    bool moving_window = false;
    double window_margin_frac = 0.25;  // recenter when crossing is this close to the right edge
    double window_shift_frac = 0.25;   // shift amount, fraction of the window
    double lambda = 0.5;               // crossing level used by the window policy
};

double auto_dt(double a_max, double sup_bound);

/// Sample a profile x -> u over sites [i_lo, i_hi] (inclusive). Negative
/// profile values are rejected (solutions live in the nonnegative cone).
LatticeState init_from_profile(const std::function<double(double)>& profile, long i_lo, long i_hi,
                               int m, double t0);

/// One classical RK4 step of the truncated system, ghost cells per boundary
/// policy, a(.) sampled at the substage times. Values in [-1e-10, 0) are
/// snapped to 0; anything below, above sup_bound + 1e-10, or non-finite
/// raises IntegrationError (advises a smaller dt).
void step(LatticeState& state, const MediaPath& path, double dt, const SimConfig& config);

/// Rightmost downcrossing of level lambda, linearly interpolated; nullopt when
/// the window has no crossing.
std::optional<double> level_crossing_rightmost(const LatticeState& state, double lambda);
/// Mirror scan for the left flank of a compactly supported hump.
std::optional<double> level_crossing_leftmost(const LatticeState& state, double lambda);

struct WindowShift {
    double time = 0.0;
    long sites = 0;
};

/// Sites the recentering policy wants to move right by (0 = stay put).
long window_shift_demand(const LatticeState& state, const SimConfig& config);

/// Drop `sites` sites on the left, append as many on the right filled by
/// geometric extrapolation from the pre-shift tail.
void shift_window_right(LatticeState& state, long sites);

struct EvolveResult {
    std::vector<WindowShift> shifts;
    std::size_t steps = 0;
};

/// Advance to t_end. The recorder (optional) fires at t0, every record_dt,
/// and at t_end. With moving_window set, the window recenters per policy and
/// every shift is logged.
EvolveResult evolve(LatticeState& state, const MediaPath& path, double t_end,
                    const SimConfig& config,
                    const std::function<void(const LatticeState&)>& recorder = {});

/// Closed-form spatially homogeneous solution 1/(1 + (1/u0 - 1) e^{-int_0^t a}).
double homogeneous_oracle(double u0, const MediaPath& path, double t);

}  // namespace latfront
