#ifndef SAW_DISPERSION_HPP
#define SAW_DISPERSION_HPP

#include <vector>

#include "saw/materials.hpp"
#include "saw/types.hpp"

namespace saw {

struct Layer {
    Material material;
    double thickness = 0.0;  // m
};

/// Ordered layers (top-first) over a semi-infinite substrate, evaluated at
/// the resonance wavenumber k = 2 pi / lambda.
struct LayerStack {
    std::vector<Layer> layers;
    Material substrate;
    double lambda = 0.0;  // acoustic wavelength, m

    /// Throws Error on non-positive thicknesses or lambda.
    void validate() const;

    /// False when the top layer is not slower than the substrate. Degenerate
    /// stacks are allowed but typically yield no guided roots.
    bool slow_on_fast() const;

    double min_layer_vT() const;
};

/// Real-valued characteristic function of the guided P-SV problem, built by
/// the transfer-matrix method with decaying partial waves in the substrate
/// and a traction-free top surface. Zeros in vp are guided-mode phase
/// velocities. Throws Error outside 0 < vp < substrate vT.
double boundary_determinant(const LayerStack& stack, double vp);

/// All guided-mode phase velocities in (vmin, vmax), located by a uniform
/// scan (default 2000 samples) with bisection refinement to 1e-6 relative.
/// Ascending order. Throws Error on an empty or inverted interval.
std::vector<double> guided_roots(const LayerStack& stack, double vmin, double vmax,
                                 int samples = 2000);

/// Kinetic-energy fraction carried by each layer (top-first) with the
/// substrate share appended last, for the mode at phase velocity vp.
std::vector<double> mode_energy_fractions(const LayerStack& stack, double vp,
                                          int subsamples = 10);

/// Rayleigh surface-wave velocity of a homogeneous half-space, the root of
/// (2 - c^2/vT^2)^2 = 4 sqrt(1 - c^2/vL^2) sqrt(1 - c^2/vT^2).
double rayleigh_velocity(double vL, double vT);

/// Design template for the film/electrode/substrate system: a piezoelectric
/// film of thickness h over the substrate, optionally under an electrode
/// layer homogenized by area coverage (density and stiffness scaled).
struct StackDesign {
    Material piezo;
    Material substrate;
    Material electrode;
    double coverage = 0.5;          // electrode area fraction
    double lambda = 0.0;            // m
    double tm_over_lambda = 0.0;    // electrode thickness / lambda; 0 = none
};

/// Bare mechanical stack (no piezoelectric stiffening) for the design at
/// film thickness h = h_over_lambda * lambda.
LayerStack build_stack(const StackDesign& design, double h_over_lambda);

struct BranchPoint {
    double h_over_lambda;
    double vp;   // m/s
    double kt2;  // fraction
};

struct DispersionBranch {
    std::vector<BranchPoint> points;  // sorted by h/lambda
    int branch_index = 0;             // 0 = fundamental, 1 = Sezawa
};

/// Dispersion curves of the fundamental and Sezawa branches over a thickness
/// grid. Roots trapped in the electrode layer (energy fraction > 1/2) are
/// discarded before branch labeling; labels follow velocity ordering with
/// nearest-neighbor continuation between grid points. Throws NoModesError
/// when no grid point has any guided root.
std::vector<DispersionBranch> find_branches(const StackDesign& design,
                                            const VectorXd& h_over_lambda_grid);

/// Delta-v/v coupling surrogate for one branch at one thickness: the film's
/// piezoelectrically active region is the top 0.6 lambda of the film, and
/// kt2 = K2 * eta / (1 + K2 * eta / 2) * (1 - eta_elec) where eta and
/// eta_elec are the kinetic-energy fractions of the active region and the
/// electrode. Clamped to [0, 1). Throws NoModesError when the branch is
/// missing at this thickness.
double kt2_delta_v(const StackDesign& design, double h_over_lambda, int branch);

struct DesignPoint {
    double h_over_lambda = 0.0;
    double tm_over_lambda = 0.0;
    double kt2 = 0.0;       // fraction
    double vp = 0.0;        // m/s
    double fs_for_lambda = 0.0;  // Hz
    bool valid = false;     // false when the Sezawa branch is missing here
};

struct SweepResult {
    std::vector<DesignPoint> points;  // row-major: h outer, tm inner
    DesignPoint best;                 // argmax kt2; ties toward smaller h then tm
};

/// Full kt2 grid over (h/lambda, tm/lambda) for the Sezawa branch, with the
/// argmax. Grid points with no Sezawa mode are recorded invalid, not fatal.
/// Evaluations run concurrently; output ordering is deterministic. Throws
/// NoModesError when every point is invalid.
SweepResult sweep_design(const StackDesign& design, const VectorXd& h_grid,
                         const VectorXd& tm_grid, int threads = 0);

/// fs = vp / lambda.
double design_frequency(const DesignPoint& point, double lambda);

}  // namespace saw

#endif
