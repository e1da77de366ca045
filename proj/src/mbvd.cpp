#include "saw/mbvd.hpp"

#include <cmath>

namespace saw {

void MbvdParams::validate() const {
    if (!(Rm > 0.0) || !(Lm > 0.0) || !(Cm > 0.0) || !(C0 > 0.0))
        throw Error("MbvdParams: Rm, Lm, Cm, C0 must be positive");
    if (R0 < 0.0 || Rs < 0.0) throw Error("MbvdParams: R0 and Rs must be non-negative");
    if (!std::isfinite(fs())) throw Error("MbvdParams: series resonance is not finite");
}

double MbvdParams::fs() const { return 1.0 / (2.0 * kPi * std::sqrt(Lm * Cm)); }

double MbvdParams::fp() const { return fs() * std::sqrt(1.0 + Cm / C0); }

double MbvdParams::qm() const { return 2.0 * kPi * fs() * Lm / Rm; }

VectorXcd mbvd_admittance(const MbvdParams& p, const VectorXd& freqs) {
    VectorXcd out(freqs.size());
    const Complex j(0.0, 1.0);
    for (Eigen::Index i = 0; i < freqs.size(); ++i) {
        double w = 2.0 * kPi * freqs[i];
        Complex zmot = p.Rm + j * (w * p.Lm) + 1.0 / (j * (w * p.Cm));
        Complex zstat = p.R0 + 1.0 / (j * (w * p.C0));
        Complex yin = 1.0 / zmot + 1.0 / zstat;
        out[i] = 1.0 / (p.Rs + 1.0 / yin);
    }
    return out;
}

MbvdParams initial_guess(const VectorXd& freqs, const VectorXcd& y12) {
    const Eigen::Index n = freqs.size();
    if (n < 3 || y12.size() != n) throw Error("initial_guess: need at least 3 matched samples");
    VectorXd mag = y12.cwiseAbs();
    Eigen::Index i_s = 0;
    mag.maxCoeff(&i_s);
    if (i_s >= n - 1) throw Error("initial_guess: no resonance detected");
    Eigen::Index i_p = i_s;
    for (Eigen::Index i = i_s; i < n; ++i)
        if (mag[i] < mag[i_p]) i_p = i;
    double fs_g = freqs[i_s], fp_g = freqs[i_p];
    if (!(fp_g > fs_g)) throw Error("initial_guess: no resonance detected");

    // static capacitance from the low-frequency decile where jwC0 dominates
    Eigen::Index n10 = std::max<Eigen::Index>(2, n / 10);
    double c0_g = 0.0;
    for (Eigen::Index i = 0; i < n10; ++i) c0_g += y12[i].imag() / (2.0 * kPi * freqs[i]);
    c0_g /= static_cast<double>(n10);
    if (!(c0_g > 0.0)) throw Error("initial_guess: no resonance detected");

    double ratio = fp_g / fs_g;
    MbvdParams g;
    g.C0 = c0_g;
    g.Cm = c0_g * (ratio * ratio - 1.0);
    g.Lm = 1.0 / (std::pow(2.0 * kPi * fs_g, 2) * g.Cm);
    g.Rm = 1.0 / mag[i_s];
    g.R0 = 0.0;
    g.Rs = 0.0;
    g.validate();
    return g;
}

namespace {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

constexpr double kFloor[6] = {1e-6, 1e-18, 1e-24, 1e-24, 1e-6, 1e-6};

MbvdParams from_vec(const Vector6d& v) { return {v[0], v[1], v[2], v[3], v[4], v[5]}; }

/// Weighted stacked residual and, when J is non-null, its Jacobian with
/// respect to the log parameters.
double cost_and_jacobian(const Vector6d& p, const VectorXd& freqs, const VectorXcd& ydata,
                         double eps, VectorXd& r, Eigen::MatrixXd* J) {
    const Eigen::Index n = freqs.size();
    const Complex j(0.0, 1.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        double w = 2.0 * kPi * freqs[i];
        Complex zmot = p[0] + j * (w * p[1]) + 1.0 / (j * (w * p[2]));
        Complex zstat = p[4] + 1.0 / (j * (w * p[3]));
        Complex ymot = 1.0 / zmot;
        Complex ystat = 1.0 / zstat;
        Complex yin = ymot + ystat;
        Complex y = 1.0 / (p[5] + 1.0 / yin);
        double wgt = 1.0 / (std::abs(ydata[i]) + eps);
        Complex res = (y - ydata[i]) * wgt;
        r[i] = res.real();
        r[n + i] = res.imag();
        if (!J) continue;
        Complex inner = y * y / (yin * yin);  // dY/dYin
        Complex dmot = -inner * ymot * ymot;  // per unit dZmot
        Complex dstat = -inner * ystat * ystat;
        Complex dy[6];
        dy[0] = dmot;
        dy[1] = dmot * j * w;
        dy[2] = -dmot / (j * w * p[2] * p[2]);
        dy[3] = -dstat / (j * w * p[3] * p[3]);
        dy[4] = dstat;
        dy[5] = -y * y;
        for (int c = 0; c < 6; ++c) {
            Complex d = dy[c] * p[c] * wgt;  // chain rule through log parameters
            (*J)(i, c) = d.real();
            (*J)(n + i, c) = d.imag();
        }
    }
    return r.squaredNorm();
}

}  // namespace

FitReport fit_mbvd(const VectorXd& freqs, const VectorXcd& y12, const MbvdParams& guess,
                   const FitConfig& config) {
    const Eigen::Index n = freqs.size();
    if (n < 7 || y12.size() != n)
        throw Error("fit_mbvd: need at least 7 matched samples for 6 parameters");
    guess.validate();

    double maxabs = y12.cwiseAbs().maxCoeff();
    double eps = maxabs > 0.0 ? 1e-6 * maxabs : 1.0;

    // log-space stepping (multiplicative updates) keeps parameters positive;
    // the values themselves are stored untransformed
    Vector6d pv;
    const double raw[6] = {guess.Rm, guess.Lm, guess.Cm, guess.C0, guess.R0, guess.Rs};
    for (int c = 0; c < 6; ++c) pv[c] = std::max(raw[c], kFloor[c]);

    VectorXd r(2 * n), r_new(2 * n);
    Eigen::MatrixXd J(2 * n, 6);
    double cost = cost_and_jacobian(pv, freqs, y12, eps, r, &J);
    double lambda = 1e-3;
    int it = 0;
    bool converged = false;
    // a start already at the optimum has only rounding noise left; stepping
    // from there would wander inside the noise floor
    const double cost_floor = 1e-28 * static_cast<double>(n);
    for (it = 1; it <= config.max_iterations; ++it) {
        if (cost < cost_floor) {
            converged = true;
            break;
        }
        Matrix6d a = J.transpose() * J;
        Vector6d g = J.transpose() * r;
        bool accepted = false;
        double rel_step = 0.0, rel_dc = 0.0;
        for (int tries = 0; tries < 50; ++tries) {
            Matrix6d damped = a;
            damped.diagonal() += lambda * (a.diagonal().array() + 1e-300).matrix();
            Vector6d step = damped.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                continue;
            }
            Vector6d pv_new = pv.array() * step.array().exp();
            for (int c = 0; c < 6; ++c) pv_new[c] = std::max(pv_new[c], kFloor[c]);
            double cost_new = cost_and_jacobian(pv_new, freqs, y12, eps, r_new, nullptr);
            if (cost_new < cost) {
                rel_step = step.cwiseAbs().maxCoeff();
                rel_dc = (cost - cost_new) / std::max(cost, 1e-300);
                pv = pv_new;
                cost = cost_new;
                std::swap(r, r_new);
                lambda = std::max(lambda * 0.3, 1e-12);
                accepted = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) break;
        if (rel_step < config.step_tol || rel_dc < config.residual_tol) {
            converged = true;
            break;
        }
        cost = cost_and_jacobian(pv, freqs, y12, eps, r, &J);
    }

    FitReport rep;
    rep.params = from_vec(pv);
    rep.iterations = std::min(it, config.max_iterations);
    rep.converged = converged;
    VectorXcd ymodel = mbvd_admittance(rep.params, freqs);
    rep.residual = std::sqrt((ymodel - y12).squaredNorm() / static_cast<double>(n));
    return rep;
}

ResonatorKpis derived_kpis(const MbvdParams& p) {
    p.validate();
    ResonatorKpis k;
    k.fs = p.fs();
    k.fp = p.fp();
    k.qm = p.qm();
    k.kt2 = kt2_from_freqs(k.fs, k.fp);
    // Qm times kt2 in percent-free form: 380 * 0.045 = 17.1
    k.fom = k.qm * k.kt2;
    return k;
}

}  // namespace saw
