#ifndef SAW_MBVD_HPP
#define SAW_MBVD_HPP

#include "saw/kpi.hpp"
#include "saw/types.hpp"

namespace saw {

/// Six-element Modified Butterworth-Van Dyke circuit: series Rs feeding the
/// parallel combination of the motional branch Rm-Lm-Cm and the static
/// branch R0-C0.
struct MbvdParams {
    double Rm = 0.0;  // ohm
    double Lm = 0.0;  // henry
    double Cm = 0.0;  // farad
    double C0 = 0.0;  // farad
    double R0 = 0.0;  // ohm
    double Rs = 0.0;  // ohm

    /// Throws Error unless Rm, Lm, Cm, C0 > 0 and R0, Rs >= 0.
    void validate() const;

    double fs() const;  // 1 / (2 pi sqrt(Lm Cm))
    double fp() const;  // fs * sqrt(1 + Cm / C0)
    double qm() const;  // 2 pi fs Lm / Rm
};

struct FitConfig {
    int max_iterations = 500;
    double step_tol = 1e-10;      // relative log-parameter step
    double residual_tol = 1e-12;  // relative residual change
};

struct FitReport {
    MbvdParams params;
    double residual = 0.0;  // rms complex admittance misfit, siemens
    int iterations = 0;
    bool converged = false;
};

/// Closed-form MBVD admittance over a frequency grid.
VectorXcd mbvd_admittance(const MbvdParams& p, const VectorXd& freqs);

/// Starting point for fit_mbvd from a Y12 trace containing one dominant
/// resonance followed by an anti-resonance: fs from argmax|Y|, fp from the
/// minimum above fs, C0 from the low-band slope of Im{Y}/w, Rm from the peak
/// height. Throws Error("no resonance detected") on monotone traces.
MbvdParams initial_guess(const VectorXd& freqs, const VectorXcd& y12);

/// Damped least-squares fit of the six parameters, in log space, minimizing
/// the stacked real/imaginary residual weighted per point by 1/(|Y12|+eps),
/// eps = 1e-6 * max|Y12|. Non-convergence is reported via the flag, not
/// thrown; an invalid guess throws.
FitReport fit_mbvd(const VectorXd& freqs, const VectorXcd& y12, const MbvdParams& guess,
                   const FitConfig& config = {});

/// fs, fp, Qm, kt2 and FOM from circuit elements. FOM = Qm * kt2 with kt2
/// as a fraction, so Qm = 380 with kt2 = 4.5% gives 17.1.
ResonatorKpis derived_kpis(const MbvdParams& p);

}  // namespace saw

#endif
