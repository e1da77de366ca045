#include "saw/dispersion.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <thread>

#include <unsupported/Eigen/MatrixFunctions>

namespace saw {

void LayerStack::validate() const {
    if (layers.empty()) throw Error("LayerStack: need at least one layer");
    if (!(lambda > 0.0)) throw Error("LayerStack: lambda must be positive");
    for (const Layer& l : layers) {
        l.material.validate();
        if (!(l.thickness > 0.0)) throw Error("LayerStack: thicknesses must be positive");
    }
    substrate.validate();
}

bool LayerStack::slow_on_fast() const {
    return !layers.empty() && layers.back().material.vT < substrate.vT;
}

double LayerStack::min_layer_vT() const {
    double v = layers.front().material.vT;
    for (const Layer& l : layers) v = std::min(v, l.material.vT);
    return v;
}

namespace {

using Eigen::Matrix4d;
using Eigen::Vector4d;

/// Nondimensionalized sagittal-plane state ODE matrix: d/d(zeta) of
/// (U, W, Szz/(k mu0), Txz/(k mu0)) with zeta = k z measured downward and
/// mu0 the substrate shear modulus.
Matrix4d layer_ode(const Material& m, double c, double mu0) {
    double mu = m.density * m.vT * m.vT;
    double lam = m.density * m.vL * m.vL - 2.0 * mu;
    double lp2 = lam + 2.0 * mu;
    Matrix4d a = Matrix4d::Zero();
    a(0, 1) = -1.0;
    a(0, 3) = mu0 / mu;
    a(1, 0) = lam / lp2;
    a(1, 2) = mu0 / lp2;
    a(2, 1) = -m.density * c * c / mu0;
    a(2, 3) = 1.0;
    a(3, 0) = 4.0 * mu * (lam + mu) / (lp2 * mu0) - m.density * c * c / mu0;
    a(3, 2) = -lam / lp2;
    return a;
}

/// Decaying P and SV partial-wave state vectors in the half-space.
void substrate_vectors(const Material& sub, double c, double mu0, Vector4d& vp_wave,
                       Vector4d& vs_wave) {
    double ba = std::sqrt(1.0 - (c / sub.vL) * (c / sub.vL));
    double bb = std::sqrt(1.0 - (c / sub.vT) * (c / sub.vT));
    double mu = sub.density * sub.vT * sub.vT;
    double g = 2.0 - (c / sub.vT) * (c / sub.vT);
    double s = mu / mu0;
    vp_wave << 1.0, -ba, s * g, -2.0 * s * ba;
    vs_wave << bb, -1.0, 2.0 * s * bb, -s * g;
}

/// Layer transfer matrices ordered top-first, already exponentiated.
std::vector<Matrix4d> layer_matrices(const LayerStack& stack, double c, double mu0) {
    double k = 2.0 * kPi / stack.lambda;
    std::vector<Matrix4d> out;
    out.reserve(stack.layers.size());
    for (const Layer& l : stack.layers)
        out.push_back((-layer_ode(l.material, c, mu0) * (k * l.thickness)).exp());
    return out;
}

}  // namespace

double boundary_determinant(const LayerStack& stack, double vp) {
    if (!(vp > 0.0) || !(vp < stack.substrate.vT))
        throw Error("boundary_determinant: vp outside the guided regime (0, substrate vT)");
    double mu0 = stack.substrate.density * stack.substrate.vT * stack.substrate.vT;
    Vector4d wp, ws;
    substrate_vectors(stack.substrate, vp, mu0, wp, ws);
    Matrix4d m = Matrix4d::Identity();
    for (const Matrix4d& mi : layer_matrices(stack, vp, mu0)) m = m * mi;
    Vector4d a = m * wp;
    Vector4d b = m * ws;
    // normalize each column before the 2x2 traction determinant to keep the
    // characteristic function bounded across the scan
    double na = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    double nb = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
    a /= na;
    b /= nb;
    return a[2] * b[3] - a[3] * b[2];
}

std::vector<double> guided_roots(const LayerStack& stack, double vmin, double vmax,
                                 int samples) {
    stack.validate();
    if (!(vmin > 0.0) || !(vmax > vmin) || !(vmax < stack.substrate.vT))
        throw Error("guided_roots: need 0 < vmin < vmax < substrate vT");
    if (samples < 2) throw Error("guided_roots: need at least 2 scan samples");
    std::vector<double> cs(samples), fs(samples);
    for (int i = 0; i < samples; ++i) {
        cs[i] = vmin + (vmax - vmin) * i / (samples - 1);
        fs[i] = boundary_determinant(stack, cs[i]);
    }
    std::vector<double> roots;
    for (int i = 0; i + 1 < samples; ++i) {
        if (fs[i] == 0.0) {
            roots.push_back(cs[i]);
            continue;
        }
        if (fs[i] * fs[i + 1] >= 0.0) continue;
        double lo = cs[i], hi = cs[i + 1], flo = fs[i];
        for (int it = 0; it < 100; ++it) {
            double mid = 0.5 * (lo + hi);
            double fm = boundary_determinant(stack, mid);
            if (flo * fm <= 0.0) {
                hi = mid;
            } else {
                lo = mid;
                flo = fm;
            }
            if ((hi - lo) / mid < 1e-12) break;
        }
        roots.push_back(0.5 * (lo + hi));
    }
    return roots;
}

std::vector<double> mode_energy_fractions(const LayerStack& stack, double vp,
                                          int subsamples) {
    stack.validate();
    double mu0 = stack.substrate.density * stack.substrate.vT * stack.substrate.vT;
    double k = 2.0 * kPi / stack.lambda;
    Vector4d wp, ws;
    substrate_vectors(stack.substrate, vp, mu0, wp, ws);
    Matrix4d m = Matrix4d::Identity();
    for (const Matrix4d& mi : layer_matrices(stack, vp, mu0)) m = m * mi;
    Vector4d a = m * wp;
    Vector4d b = m * ws;
    Eigen::Matrix2d traction;
    traction << a[2], b[2], a[3], b[3];
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(traction, Eigen::ComputeFullV);
    double c1 = svd.matrixV()(0, 1);
    double c2 = svd.matrixV()(1, 1);

    // state at the film/substrate interface, integrated upward layer by layer
    Vector4d xi = c1 * wp + c2 * ws;
    std::vector<double> energies(stack.layers.size() + 1, 0.0);
    for (std::size_t li = stack.layers.size(); li-- > 0;) {
        const Layer& l = stack.layers[li];
        Matrix4d step =
            (-layer_ode(l.material, vp, mu0) * (k * l.thickness / subsamples)).exp();
        double e = 0.0;
        Vector4d x = xi;
        for (int i = 0; i < subsamples; ++i) {
            Vector4d xn = step * x;
            double d0 = x[0] * x[0] + x[1] * x[1];
            double d1 = xn[0] * xn[0] + xn[1] * xn[1];
            e += 0.5 * (d0 + d1) * (l.thickness / subsamples) * l.material.density;
            x = xn;
        }
        energies[li] = e;
        xi = x;
    }
    // analytic depth integrals of the two-exponential substrate field
    double ba = std::sqrt(1.0 - (vp / stack.substrate.vL) * (vp / stack.substrate.vL));
    double bb = std::sqrt(1.0 - (vp / stack.substrate.vT) * (vp / stack.substrate.vT));
    double pa = k * ba, pb = k * bb;
    double eu = c1 * c1 / (2.0 * pa) + 2.0 * c1 * c2 * bb / (pa + pb) +
                c2 * c2 * bb * bb / (2.0 * pb);
    double ew = c1 * c1 * ba * ba / (2.0 * pa) + 2.0 * c1 * c2 * ba / (pa + pb) +
                c2 * c2 / (2.0 * pb);
    energies.back() = stack.substrate.density * (eu + ew);

    double total = 0.0;
    for (double e : energies) total += e;
    if (!(total > 0.0)) throw Error("mode_energy_fractions: degenerate mode shape");
    for (double& e : energies) e /= total;
    return energies;
}

double rayleigh_velocity(double vL, double vT) {
    auto f = [&](double c) {
        double ba = std::sqrt(1.0 - (c / vL) * (c / vL));
        double bb = std::sqrt(1.0 - (c / vT) * (c / vT));
        double g = 2.0 - (c / vT) * (c / vT);
        return g * g - 4.0 * ba * bb;
    };
    double lo = 0.5 * vT, hi = 0.999999 * vT;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f(lo) * f(mid) <= 0.0) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

LayerStack build_stack(const StackDesign& design, double h_over_lambda) {
    LayerStack stack;
    stack.lambda = design.lambda;
    stack.substrate = design.substrate;
    if (design.tm_over_lambda > 0.0) {
        Material elec = design.electrode;
        // area-coverage homogenization scales density and stiffness alike,
        // leaving the bulk velocities untouched
        elec.density *= design.coverage;
        stack.layers.push_back({elec, design.tm_over_lambda * design.lambda});
    }
    stack.layers.push_back({design.piezo, h_over_lambda * design.lambda});
    stack.validate();
    return stack;
}

namespace {

constexpr double kPenetrationDepth = 0.6;  // active-zone depth, fraction of lambda

struct BranchSample {
    double vp;
    double kt2;
};

/// Stack used by the coupling surrogate: the film is split into the
/// electrically active top zone and its passive remainder so the energy
/// integral can be read off per region. Returns the electrode index (or -1)
/// and the active-zone index.
LayerStack split_stack(const StackDesign& design, double h_over_lambda, int& elec_idx,
                       int& active_idx) {
    LayerStack stack;
    stack.lambda = design.lambda;
    stack.substrate = design.substrate;
    elec_idx = -1;
    if (design.tm_over_lambda > 0.0) {
        Material elec = design.electrode;
        elec.density *= design.coverage;
        stack.layers.push_back({elec, design.tm_over_lambda * design.lambda});
        elec_idx = 0;
    }
    double h = h_over_lambda * design.lambda;
    double active = std::min(h, kPenetrationDepth * design.lambda);
    active_idx = static_cast<int>(stack.layers.size());
    stack.layers.push_back({design.piezo, active});
    if (h > active) stack.layers.push_back({design.piezo, h - active});
    stack.validate();
    return stack;
}

/// Guided roots of the design stack with electrode-trapped modes removed
/// (kinetic-energy fraction in the electrode above 1/2), paired with the
/// surrogate coupling value. Index in the returned list is the branch index.
std::vector<BranchSample> branch_samples(const StackDesign& design, double h_over_lambda) {
    int elec_idx = -1, active_idx = 0;
    LayerStack stack = split_stack(design, h_over_lambda, elec_idx, active_idx);
    double vmin = 0.75 * design.piezo.vT;
    double vmax = 0.999 * design.substrate.vT;
    if (!(vmax > vmin)) return {};
    std::vector<double> roots = guided_roots(stack, vmin, vmax);
    std::vector<BranchSample> out;
    for (double vp : roots) {
        std::vector<double> frac = mode_energy_fractions(stack, vp);
        double eta_elec = elec_idx >= 0 ? frac[elec_idx] : 0.0;
        if (eta_elec > 0.5) continue;
        double eta = frac[active_idx];
        double k2 = design.piezo.K2;
        double kt2 = k2 * eta / (1.0 + 0.5 * k2 * eta) * (1.0 - eta_elec);
        kt2 = std::clamp(kt2, 0.0, 1.0 - 1e-12);
        out.push_back({vp, kt2});
    }
    return out;
}

}  // namespace

std::vector<DispersionBranch> find_branches(const StackDesign& design,
                                            const VectorXd& h_over_lambda_grid) {
    if (h_over_lambda_grid.size() == 0) throw Error("find_branches: empty thickness grid");
    for (Eigen::Index i = 0; i < h_over_lambda_grid.size(); ++i) {
        if (!(h_over_lambda_grid[i] > 0.0) ||
            (i > 0 && !(h_over_lambda_grid[i] > h_over_lambda_grid[i - 1])))
            throw Error("find_branches: grid must be positive and ascending");
    }
    std::vector<DispersionBranch> branches;
    bool any = false;
    for (Eigen::Index gi = 0; gi < h_over_lambda_grid.size(); ++gi) {
        double hol = h_over_lambda_grid[gi];
        std::vector<BranchSample> samples = branch_samples(design, hol);
        if (samples.empty()) continue;
        any = true;
        for (std::size_t bi = 0; bi < samples.size(); ++bi) {
            while (branches.size() <= bi) {
                DispersionBranch b;
                b.branch_index = static_cast<int>(branches.size());
                branches.push_back(b);
            }
            branches[bi].points.push_back({hol, samples[bi].vp, samples[bi].kt2});
        }
    }
    if (!any) throw NoModesError("no guided modes (check slow-on-fast ordering)");
    return branches;
}

double kt2_delta_v(const StackDesign& design, double h_over_lambda, int branch) {
    if (branch < 0) throw Error("kt2_delta_v: branch index must be non-negative");
    std::vector<BranchSample> samples = branch_samples(design, h_over_lambda);
    if (static_cast<std::size_t>(branch) >= samples.size())
        throw NoModesError("kt2_delta_v: branch missing at this thickness");
    return samples[static_cast<std::size_t>(branch)].kt2;
}

SweepResult sweep_design(const StackDesign& design, const VectorXd& h_grid,
                         const VectorXd& tm_grid, int threads) {
    if (h_grid.size() == 0 || tm_grid.size() == 0)
        throw Error("sweep_design: grids must be non-empty");
    const Eigen::Index nh = h_grid.size(), nt = tm_grid.size();
    SweepResult result;
    result.points.resize(static_cast<std::size_t>(nh * nt));

    auto evaluate = [&](Eigen::Index flat) {
        Eigen::Index ih = flat / nt, it = flat % nt;
        DesignPoint& pt = result.points[static_cast<std::size_t>(flat)];
        pt.h_over_lambda = h_grid[ih];
        pt.tm_over_lambda = tm_grid[it];
        StackDesign local = design;
        local.tm_over_lambda = tm_grid[it];
        std::vector<BranchSample> samples = branch_samples(local, h_grid[ih]);
        if (samples.size() < 2) return;  // Sezawa branch absent: leave invalid
        pt.vp = samples[1].vp;
        pt.kt2 = samples[1].kt2;
        pt.fs_for_lambda = pt.vp / design.lambda;
        pt.valid = true;
    };

    int nthreads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(nh * nt)));
    if (nthreads == 1) {
        for (Eigen::Index flat = 0; flat < nh * nt; ++flat) evaluate(flat);
    } else {
        std::vector<std::thread> pool;
        std::atomic<Eigen::Index> next{0};
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back([&]() {
                for (Eigen::Index flat = next++; flat < nh * nt; flat = next++) evaluate(flat);
            });
        }
        for (std::thread& t : pool) t.join();
    }

    bool any = false;
    for (const DesignPoint& pt : result.points) {
        if (!pt.valid) continue;
        if (!any || pt.kt2 > result.best.kt2) result.best = pt;
        any = true;
    }
    if (!any) throw NoModesError("sweep_design: no guided Sezawa mode anywhere on the grid");
    return result;
}

double design_frequency(const DesignPoint& point, double lambda) {
    if (!(lambda > 0.0)) throw Error("design_frequency: lambda must be positive");
    return point.vp / lambda;
}

}  // namespace saw
