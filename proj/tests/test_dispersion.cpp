#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "saw/dispersion.hpp"
#include "synth.hpp"

using namespace saw;

namespace {

Material sic() { return {"6H-SiC", 3211.0, 12500.0, 7100.0, 0.0}; }
Material scaln30() { return {"ScAlN30", 3400.0, 8600.0, 5300.0, 0.12}; }
Material alsicu() { return {"AlSiCu", 2700.0, 6420.0, 3040.0, 0.0}; }

StackDesign reference_design(double tm_over_lambda = 0.125) {
    StackDesign d;
    d.piezo = scaln30();
    d.substrate = sic();
    d.electrode = alsicu();
    d.coverage = 0.5;
    d.lambda = 400e-9;
    d.tm_over_lambda = tm_over_lambda;
    return d;
}

LayerStack bare_stack(double h_over_lambda) {
    StackDesign d = reference_design(0.0);
    return build_stack(d, h_over_lambda);
}

}  // namespace

TEST_CASE("homogeneous half-space: the only root is the Rayleigh velocity") {
    Material m = sic();
    LayerStack stack;
    stack.lambda = 400e-9;
    stack.substrate = m;
    stack.layers.push_back({m, 0.5 * stack.lambda});
    std::vector<double> roots = guided_roots(stack, 0.75 * m.vT, 0.999 * m.vT);
    REQUIRE(roots.size() == 1);
    CHECK(synth::rel_err(roots[0], rayleigh_velocity(m.vL, m.vT)) < 1e-3);
}

TEST_CASE("vanishing film recovers the substrate Rayleigh root within 0.1%") {
    LayerStack stack = bare_stack(1e-4);
    std::vector<double> roots =
        guided_roots(stack, 0.75 * stack.substrate.vT, 0.999 * stack.substrate.vT);
    REQUIRE(!roots.empty());
    double vr = rayleigh_velocity(stack.substrate.vL, stack.substrate.vT);
    CHECK(synth::rel_err(roots[0], vr) < 1e-3);
}

TEST_CASE("classical Rayleigh root for nu = 0.25") {
    // vL/vT = sqrt(3) at Poisson ratio 1/4; vR = 0.9194 vT
    double vt = 5000.0;
    CHECK(rayleigh_velocity(vt * std::sqrt(3.0), vt) == doctest::Approx(0.9194 * vt).epsilon(1e-3));
}

TEST_CASE("every root is bracketed by a determinant sign change") {
    LayerStack stack = bare_stack(0.625);
    double vmin = 0.75 * stack.min_layer_vT();
    double vmax = 0.999 * stack.substrate.vT;
    std::vector<double> roots = guided_roots(stack, vmin, vmax);
    REQUIRE(roots.size() >= 2);
    for (double r : roots) {
        double span = 1e-4 * r;
        double lo = boundary_determinant(stack, r - span);
        double hi = boundary_determinant(stack, r + span);
        CHECK(lo * hi < 0.0);
    }
}

TEST_CASE("vp outside the guided regime is rejected") {
    LayerStack stack = bare_stack(0.5);
    CHECK_THROWS_AS(boundary_determinant(stack, 0.0), Error);
    CHECK_THROWS_AS(boundary_determinant(stack, stack.substrate.vT * 1.01), Error);
}

TEST_CASE("scale invariance under joint wavelength and thickness scaling") {
    LayerStack a = bare_stack(0.625);
    LayerStack b = a;
    b.lambda *= 37.0;
    for (Layer& l : b.layers) l.thickness *= 37.0;
    double vmin = 0.75 * a.min_layer_vT(), vmax = 0.999 * a.substrate.vT;
    std::vector<double> ra = guided_roots(a, vmin, vmax);
    std::vector<double> rb = guided_roots(b, vmin, vmax);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) CHECK(synth::rel_err(ra[i], rb[i]) < 1e-9);
}

TEST_CASE("branches: second mode appears above cutoff and orders by velocity") {
    StackDesign d = reference_design(0.0);
    VectorXd grid = synth::linspace(0.1, 1.0, 10);
    std::vector<DispersionBranch> branches = find_branches(d, grid);
    REQUIRE(branches.size() >= 2);
    const DispersionBranch& fundamental = branches[0];
    const DispersionBranch& sezawa = branches[1];
    CHECK(fundamental.branch_index == 0);
    CHECK(sezawa.branch_index == 1);
    // the higher branch exists only above its cutoff thickness
    CHECK(sezawa.points.size() < fundamental.points.size());
    // velocity ordering where both exist, and monotone thickness loading
    double prev_vp = 1e300;
    for (const BranchPoint& p : sezawa.points) {
        CHECK(p.vp < prev_vp);
        prev_vp = p.vp;
        CHECK(p.vp < d.substrate.vT);
        for (const BranchPoint& q : fundamental.points)
            if (q.h_over_lambda == p.h_over_lambda) CHECK(p.vp > q.vp);
    }
}

TEST_CASE("reference design point lands within 15% of 16 GHz") {
    StackDesign d = reference_design();
    VectorXd grid(1);
    grid << 0.625;
    std::vector<DispersionBranch> branches = find_branches(d, grid);
    REQUIRE(branches.size() >= 2);
    REQUIRE(!branches[1].points.empty());
    DesignPoint pt;
    pt.vp = branches[1].points[0].vp;
    double fs = design_frequency(pt, d.lambda);
    CHECK(fs == doctest::Approx(16e9).epsilon(0.15));
}

TEST_CASE("no guided modes on a fast-on-slow stack") {
    StackDesign d = reference_design(0.0);
    d.piezo = sic();
    d.substrate = alsicu();
    LayerStack stack = build_stack(d, 0.5);
    CHECK_FALSE(stack.slow_on_fast());
    VectorXd grid(1);
    grid << 0.5;
    CHECK_THROWS_AS(find_branches(d, grid), NoModesError);
}

TEST_CASE("coupling surrogate: zero K2 film gives zero kt2") {
    StackDesign d = reference_design(0.0);
    d.piezo.K2 = 0.0;
    CHECK(kt2_delta_v(d, 0.625, 1) == doctest::Approx(0.0));
}

TEST_CASE("coupling surrogate grows with K2") {
    StackDesign lo = reference_design();
    StackDesign hi = reference_design();
    hi.piezo.K2 = 2.0 * lo.piezo.K2;
    CHECK(kt2_delta_v(hi, 0.625, 1) > kt2_delta_v(lo, 0.625, 1));
}

TEST_CASE("kt2(h/lambda) has a single interior maximum on [0.4, 0.9]") {
    StackDesign d = reference_design(0.0);
    std::vector<double> vals;
    for (double h = 0.40; h <= 0.901; h += 0.05) {
        double v = 0.0;
        try {
            v = kt2_delta_v(d, h, 1);
        } catch (const NoModesError&) {
            v = 0.0;
        }
        vals.push_back(v);
    }
    std::size_t imax = 0;
    for (std::size_t i = 1; i < vals.size(); ++i)
        if (vals[i] > vals[imax]) imax = i;
    CHECK(imax > 0);
    CHECK(imax < vals.size() - 1);
    // single interior maximum: rises to it, falls after it
    int direction_changes = 0;
    for (std::size_t i = 1; i + 1 < vals.size(); ++i) {
        if ((vals[i] - vals[i - 1]) * (vals[i + 1] - vals[i]) < 0.0) ++direction_changes;
    }
    CHECK(direction_changes <= 1);
}

TEST_CASE("missing branch raises NoModesError") {
    StackDesign d = reference_design(0.0);
    CHECK_THROWS_AS(kt2_delta_v(d, 0.05, 1), NoModesError);  // below Sezawa cutoff
    CHECK_THROWS_AS(kt2_delta_v(d, 0.625, -1), Error);
}

TEST_CASE("single-point sweep returns that point as the argmax") {
    StackDesign d = reference_design(0.0);
    VectorXd h(1), tm(1);
    h << 0.625;
    tm << 0.125;
    SweepResult r = sweep_design(d, h, tm);
    REQUIRE(r.points.size() == 1);
    CHECK(r.best.h_over_lambda == 0.625);
    CHECK(r.best.tm_over_lambda == 0.125);
    CHECK(r.best.valid);
    CHECK(r.best.fs_for_lambda == doctest::Approx(r.best.vp / d.lambda));
}

TEST_CASE("tm = 0 sweep column equals the bare-stack curve") {
    StackDesign d = reference_design(0.0);
    VectorXd h = synth::linspace(0.5, 0.8, 4);
    VectorXd tm(1);
    tm << 0.0;
    SweepResult r = sweep_design(d, h, tm);
    for (Eigen::Index i = 0; i < h.size(); ++i) {
        const DesignPoint& pt = r.points[static_cast<std::size_t>(i)];
        REQUIRE(pt.valid);
        CHECK(pt.kt2 == doctest::Approx(kt2_delta_v(d, h[i], 1)).epsilon(1e-12));
    }
}

TEST_CASE("sweep results are identical across thread counts") {
    StackDesign d = reference_design();
    VectorXd h = synth::linspace(0.5, 0.8, 4);
    VectorXd tm = synth::linspace(0.075, 0.175, 3);
    SweepResult serial = sweep_design(d, h, tm, 1);
    SweepResult parallel = sweep_design(d, h, tm, 4);
    REQUIRE(serial.points.size() == parallel.points.size());
    for (std::size_t i = 0; i < serial.points.size(); ++i) {
        CHECK(serial.points[i].valid == parallel.points[i].valid);
        CHECK(serial.points[i].vp == parallel.points[i].vp);
        CHECK(serial.points[i].kt2 == parallel.points[i].kt2);
    }
    CHECK(serial.best.h_over_lambda == parallel.best.h_over_lambda);
    CHECK(serial.best.tm_over_lambda == parallel.best.tm_over_lambda);
}

TEST_CASE("design_frequency basics") {
    DesignPoint pt;
    pt.vp = 6400.0;
    CHECK(design_frequency(pt, 400e-9) == doctest::Approx(16e9));
    CHECK(design_frequency(pt, 800e-9) == doctest::Approx(8e9));
    CHECK_THROWS_AS(design_frequency(pt, 0.0), Error);
}
