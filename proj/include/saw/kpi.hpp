#ifndef SAW_KPI_HPP
#define SAW_KPI_HPP

#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "saw/types.hpp"

namespace saw {

struct PowerSweepReport {
    std::vector<double> levels;                  // input power, dBm
    std::vector<double> peak_admittance_drift;   // % vs. baseline, per level
    std::vector<double> q3db_drift;              // % vs. baseline, per level
    bool returned_to_baseline = false;
    double tolerance = 0.02;                     // fraction used for the flag
};

/// Derived scalar metrics. Fields not produced by a given extraction stage
/// stay NaN; tcf1 and power_metrics are present only when measured.
struct ResonatorKpis {
    double fs = std::numeric_limits<double>::quiet_NaN();     // Hz
    double fp = std::numeric_limits<double>::quiet_NaN();     // Hz
    double bw3db = std::numeric_limits<double>::quiet_NaN();  // Hz
    double q3db = std::numeric_limits<double>::quiet_NaN();
    double qm = std::numeric_limits<double>::quiet_NaN();
    double qbode = std::numeric_limits<double>::quiet_NaN();
    double kt2 = std::numeric_limits<double>::quiet_NaN();    // fraction
    double fom = std::numeric_limits<double>::quiet_NaN();    // Qm * kt2[%]
    std::optional<double> tcf1;                               // ppm/K
    std::optional<PowerSweepReport> power_metrics;
};

struct Q3dbResult {
    double fs;     // peak frequency after parabolic refinement, Hz
    double bw3db;  // half-power bandwidth, Hz
    double q3db;   // fs / bw3db
};

/// Half-power quality factor of a dominant |y| peak. The peak is refined by
/// 3-point parabolic interpolation on log|y|; the two crossings of peak/sqrt(2)
/// are located by linear interpolation. Throws Error "band too narrow" when a
/// crossing falls outside the span.
Q3dbResult q_3db(const VectorXd& freqs, const VectorXcd& y);

/// kt^2 = (pi/2)(fs/fp) / tan((pi/2)(fs/fp)). Throws Error unless 0 < fs < fp.
double kt2_from_freqs(double fs, double fp);

/// Bode quality factor trace Q(w) = w * tau_g * |S11| / (1 - |S11|^2) with
/// group delay from central differences on unwrapped phase, smoothed by a
/// centered moving average of `window` points (odd; 1 disables smoothing).
/// Throws Error when |S11| >= 1 anywhere or the window exceeds the trace.
VectorXd bode_q_trace(const VectorXd& freqs, const VectorXcd& s11, int window = 11);

struct BodeQPeak {
    double q;
    double freq;  // Hz
};

/// Maximum of a Bode-Q trace restricted to |f - fs| <= 3 * bw3db. Throws
/// Error when the search band misses the grid entirely.
BodeQPeak bode_q_peak(const VectorXd& freqs, const VectorXd& q, double fs, double bw3db);

/// First-order temperature coefficient of frequency in ppm/K: least-squares
/// slope of fs(T) normalized by fs at the lowest temperature. Throws Error
/// with fewer than 2 points or a single distinct temperature.
double tcf_fit(const std::vector<std::pair<double, double>>& temp_freq_points);

struct PowerTrace {
    double level_dbm;
    VectorXd freqs;
    VectorXcd y12;
};

/// Per-level drift of peak |Y12| and Q3dB against the baseline trace. All
/// traces must share the baseline's frequency grid exactly. The final trace
/// decides returned_to_baseline at the given fractional tolerance.
PowerSweepReport power_sweep_compare(const std::vector<PowerTrace>& traces,
                                     std::size_t baseline_index, double tolerance = 0.02);

}  // namespace saw

#endif
