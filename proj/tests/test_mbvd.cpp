#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "saw/mbvd.hpp"
#include "synth.hpp"

using namespace saw;

TEST_CASE("motional resonance sits at the closed-form fs") {
    MbvdParams p = synth::reference_device();
    CHECK(p.fs() == doctest::Approx(15.9155e9).epsilon(1e-4));
    VectorXd f = synth::span_grid(p, 0.99, 1.01, 20001);
    VectorXcd y = mbvd_admittance(p, f);
    Eigen::Index ipk = 0;
    y.cwiseAbs().maxCoeff(&ipk);
    CHECK(synth::rel_err(f[ipk], p.fs()) < 1e-4);
}

TEST_CASE("low-frequency limit is the static capacitor") {
    MbvdParams p = synth::reference_device();
    p.Rs = 0.0;
    p.R0 = 0.0;
    VectorXd f(2);
    f << 1e3, 2e3;
    VectorXcd y = mbvd_admittance(p, f);
    double w = 2.0 * kPi * f[0];
    // the motional branch contributes ~ w Cm on top of w C0
    CHECK(y[0].imag() == doctest::Approx(w * (p.C0 + p.Cm)).epsilon(1e-6));
    CHECK(std::abs(y[0].real()) < 1e-18);
}

TEST_CASE("Qm of the reference device is 380") {
    MbvdParams p = synth::reference_device();
    CHECK(p.qm() == doctest::Approx(380.0).epsilon(1e-2));
}

TEST_CASE("parameter invariants") {
    MbvdParams p = synth::reference_device();
    CHECK_NOTHROW(p.validate());
    CHECK(p.fs() < p.fp());
    p.Cm = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = synth::reference_device();
    p.Rs = -1.0;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("peak and dip of the lossless trace sit at fs and fp") {
    MbvdParams p = synth::reference_device();
    p.Rs = 0.0;
    p.R0 = 0.0;
    VectorXd f = synth::span_grid(p, 0.98, 1.04, 60001);
    VectorXcd y = mbvd_admittance(p, f);
    VectorXd mag = y.cwiseAbs();
    Eigen::Index ipk = 0, idip = 0;
    mag.maxCoeff(&ipk);
    mag.minCoeff(&idip);
    CHECK(synth::rel_err(f[ipk], p.fs()) < 1e-4);
    CHECK(synth::rel_err(f[idip], p.fp()) < 1e-4);
}

TEST_CASE("initial guess lands within 30% on the reactive elements") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.70, 1.30, 4001);
    VectorXcd y = mbvd_admittance(p, f);
    MbvdParams g = initial_guess(f, y);
    CHECK(synth::rel_err(g.Lm, p.Lm) < 0.30);
    CHECK(synth::rel_err(g.Cm, p.Cm) < 0.30);
    CHECK(synth::rel_err(g.C0, p.C0) < 0.30);
    // anti-resonance spacing of the reference device
    double ratio = std::sqrt(1.0 + g.Cm / g.C0);
    CHECK(ratio == doctest::Approx(1.019).epsilon(5e-3));
}

TEST_CASE("monotone capacitor trace has no resonance") {
    VectorXd f = synth::linspace(1e9, 2e9, 200);
    VectorXcd y(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
        y[i] = Complex(0.0, 2.0 * kPi * f[i] * 1e-12);
    CHECK_THROWS_WITH_AS(initial_guess(f, y), doctest::Contains("no resonance detected"),
                         Error);
}

TEST_CASE("noise-free fit recovers all six parameters within 0.1%") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.70, 1.30, 4001);
    VectorXcd y = mbvd_admittance(p, f);
    FitReport rep = fit_mbvd(f, y, initial_guess(f, y));
    CHECK(rep.converged);
    CHECK(synth::rel_err(rep.params.Rm, p.Rm) < 1e-3);
    CHECK(synth::rel_err(rep.params.Lm, p.Lm) < 1e-3);
    CHECK(synth::rel_err(rep.params.Cm, p.Cm) < 1e-3);
    CHECK(synth::rel_err(rep.params.C0, p.C0) < 1e-3);
    CHECK(synth::rel_err(rep.params.R0, p.R0) < 1e-3);
    CHECK(synth::rel_err(rep.params.Rs, p.Rs) < 1e-3);
}

TEST_CASE("fit idempotence: starting at the truth terminates immediately") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.95, 1.08, 801);
    VectorXcd y = mbvd_admittance(p, f);
    FitReport rep = fit_mbvd(f, y, p);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 3);
    CHECK(rep.residual < 1e-14 * y.cwiseAbs().maxCoeff());
}

TEST_CASE("all-zero trace does not produce a confident fit") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.95, 1.08, 101);
    VectorXcd y = VectorXcd::Zero(f.size());
    FitReport rep = fit_mbvd(f, y, p);
    // degenerate input: either the fit gives up or the model collapses
    CHECK((!rep.converged || rep.residual < 1e-6));
}

TEST_CASE("invalid guess is rejected") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.95, 1.08, 101);
    VectorXcd y = mbvd_admittance(p, f);
    MbvdParams bad = p;
    bad.Lm = -1.0;
    CHECK_THROWS_AS(fit_mbvd(f, y, bad), Error);
}

TEST_CASE("scale covariance of the derived quantities") {
    MbvdParams p = synth::reference_device();
    ResonatorKpis a = derived_kpis(p);
    double k = 7.3;
    MbvdParams q{p.Rm * k, p.Lm * k, p.Cm / k, p.C0 / k, p.R0 * k, p.Rs * k};
    ResonatorKpis b = derived_kpis(q);
    CHECK(synth::rel_err(b.fs, a.fs) < 1e-12);
    CHECK(synth::rel_err(b.fp, a.fp) < 1e-12);
    CHECK(synth::rel_err(b.qm, a.qm) < 1e-12);
    CHECK(synth::rel_err(b.kt2, a.kt2) < 1e-12);
    CHECK(synth::rel_err(b.fom, a.fom) < 1e-12);
}

TEST_CASE("derived KPIs of the reference device") {
    ResonatorKpis k = derived_kpis(synth::reference_device());
    CHECK(k.qm == doctest::Approx(380.0).epsilon(1e-2));
    CHECK(k.kt2 == doctest::Approx(0.045).epsilon(0.02));
    CHECK(k.fom == doctest::Approx(k.qm * k.kt2).epsilon(1e-12));
    CHECK(k.fom > 17.0);
}

TEST_CASE("vanishing Cm/C0 closes the fs-fp gap") {
    MbvdParams p = synth::reference_device();
    p.Cm = 1e-22;
    ResonatorKpis k = derived_kpis(p);
    CHECK(k.fp / k.fs - 1.0 < 1e-6);
    CHECK(k.kt2 < 1e-5);
}

TEST_CASE("fit of the reference synthetic reproduces kt2 = 4.5% +- 0.05") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.70, 1.30, 4001);
    VectorXcd y = mbvd_admittance(p, f);
    FitReport rep = fit_mbvd(f, y, initial_guess(f, y));
    ResonatorKpis k = derived_kpis(rep.params);
    CHECK(k.kt2 * 100.0 == doctest::Approx(4.5).epsilon(0.012));
}

TEST_CASE("noisy fits recover within 2% (small Monte-Carlo smoke run)") {
    MbvdParams p = synth::reference_device();
    VectorXd f = synth::span_grid(p, 0.70, 1.30, 100001);
    VectorXcd y = mbvd_admittance(p, f);
    int ok = 0;
    const int trials = 5;
    for (int seed = 0; seed < trials; ++seed) {
        VectorXcd yn = synth::add_relative_noise(y, 0.01, 1000 + seed);
        FitReport rep = fit_mbvd(f, yn, initial_guess(f, yn));
        double worst = 0.0;
        worst = std::max(worst, synth::rel_err(rep.params.Rm, p.Rm));
        worst = std::max(worst, synth::rel_err(rep.params.Lm, p.Lm));
        worst = std::max(worst, synth::rel_err(rep.params.Cm, p.Cm));
        worst = std::max(worst, synth::rel_err(rep.params.C0, p.C0));
        worst = std::max(worst, synth::rel_err(rep.params.R0, p.R0));
        worst = std::max(worst, synth::rel_err(rep.params.Rs, p.Rs));
        if (rep.converged && worst < 0.02) ++ok;
    }
    CHECK(ok >= 4);
}
