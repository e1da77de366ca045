#include "saw/kpi.hpp"

#include <algorithm>
#include <cmath>

namespace saw {

Q3dbResult q_3db(const VectorXd& freqs, const VectorXcd& y) {
    const Eigen::Index n = freqs.size();
    if (n < 3 || y.size() != n) throw Error("q_3db: need at least 3 matched samples");
    VectorXd mag = y.cwiseAbs();
    Eigen::Index ip = 0;
    mag.maxCoeff(&ip);
    if (ip == 0 || ip == n - 1) throw Error("q_3db: band too narrow (peak at span edge)");

    // parabolic refinement on log magnitude around the grid peak
    double l0 = std::log(mag[ip - 1]), l1 = std::log(mag[ip]), l2 = std::log(mag[ip + 1]);
    double denom = l0 - 2.0 * l1 + l2;
    double fs = freqs[ip];
    double peak = mag[ip];
    if (denom < 0.0) {
        double delta = 0.5 * (l0 - l2) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
        // local grid may be non-uniform; interpolate the frequency likewise
        double df = (delta >= 0.0) ? freqs[ip + 1] - freqs[ip] : freqs[ip] - freqs[ip - 1];
        fs = freqs[ip] + delta * df;
        peak = std::exp(l1 - 0.25 * (l0 - l2) * delta);
    }

    const double thresh = peak / std::sqrt(2.0);
    auto cross = [&](int dir) -> double {
        for (Eigen::Index i = ip; i + dir >= 0 && i + dir < n; i += dir) {
            double a = mag[i], b = mag[i + dir];
            if (b < thresh) {
                double t = (a - thresh) / (a - b);
                return freqs[i] + t * (freqs[i + dir] - freqs[i]);
            }
        }
        throw Error("q_3db: band too narrow");
    };
    double flo = cross(-1);
    double fhi = cross(+1);
    double bw = fhi - flo;
    return {fs, bw, fs / bw};
}

double kt2_from_freqs(double fs, double fp) {
    if (!(fs > 0.0) || !(fs < fp)) throw Error("kt2_from_freqs: need 0 < fs < fp");
    double x = 0.5 * kPi * fs / fp;
    return x / std::tan(x);
}

VectorXd bode_q_trace(const VectorXd& freqs, const VectorXcd& s11, int window) {
    const Eigen::Index n = freqs.size();
    if (n < 3 || s11.size() != n) throw Error("bode_q: need at least 3 matched samples");
    if (window < 1 || window % 2 == 0) throw Error("bode_q: window must be odd and >= 1");
    if (window > n) throw Error("bode_q: window larger than trace");

    VectorXd mag = s11.cwiseAbs();
    if ((mag.array() >= 1.0).any()) throw Error("bode_q: |S11| >= 1, data is not passive");

    VectorXd phase(n);
    double offset = 0.0;
    double prev = std::arg(s11[0]);
    phase[0] = prev;
    for (Eigen::Index i = 1; i < n; ++i) {
        double ph = std::arg(s11[i]);
        double d = ph - prev;
        if (d > kPi) offset -= 2.0 * kPi;
        else if (d < -kPi) offset += 2.0 * kPi;
        phase[i] = ph + offset;
        prev = ph;
    }

    VectorXd w = 2.0 * kPi * freqs;
    VectorXd tg(n);
    tg[0] = -(phase[1] - phase[0]) / (w[1] - w[0]);
    tg[n - 1] = -(phase[n - 1] - phase[n - 2]) / (w[n - 1] - w[n - 2]);
    for (Eigen::Index i = 1; i < n - 1; ++i)
        tg[i] = -(phase[i + 1] - phase[i - 1]) / (w[i + 1] - w[i - 1]);

    VectorXd q(n);
    for (Eigen::Index i = 0; i < n; ++i)
        q[i] = w[i] * tg[i] * mag[i] / (1.0 - mag[i] * mag[i]);

    if (window == 1) return q;
    VectorXd out = VectorXd::Zero(n);
    const int half = window / 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = -half; j <= half; ++j) {
            Eigen::Index idx = i + j;
            if (idx >= 0 && idx < n) acc += q[idx];
        }
        out[i] = acc / window;  // zero-padded edges, same length as input
    }
    return out;
}

BodeQPeak bode_q_peak(const VectorXd& freqs, const VectorXd& q, double fs, double bw3db) {
    if (freqs.size() != q.size() || freqs.size() == 0)
        throw Error("bode_q_peak: trace size mismatch");
    bool found = false;
    BodeQPeak best{-std::numeric_limits<double>::infinity(), 0.0};
    for (Eigen::Index i = 0; i < freqs.size(); ++i) {
        if (std::abs(freqs[i] - fs) > 3.0 * bw3db) continue;
        found = true;
        if (q[i] > best.q) best = {q[i], freqs[i]};
    }
    if (!found) throw Error("bode_q_peak: search band misses the frequency grid");
    return best;
}

double tcf_fit(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 2) throw Error("tcf_fit: need at least 2 temperature points");
    double tmin = pts[0].first, f_at_tmin = pts[0].second;
    double st = 0.0, sf = 0.0;
    for (const auto& [t, f] : pts) {
        st += t;
        sf += f;
        if (t < tmin) {
            tmin = t;
            f_at_tmin = f;
        }
    }
    const double n = static_cast<double>(pts.size());
    double tbar = st / n, fbar = sf / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [t, f] : pts) {
        sxx += (t - tbar) * (t - tbar);
        sxy += (t - tbar) * (f - fbar);
    }
    if (sxx == 0.0) throw Error("tcf_fit: all points share one temperature");
    double slope = sxy / sxx;
    return slope / f_at_tmin * 1e6;
}

PowerSweepReport power_sweep_compare(const std::vector<PowerTrace>& traces,
                                     std::size_t baseline_index, double tolerance) {
    if (traces.size() < 2) throw Error("power_sweep_compare: need at least 2 traces");
    if (baseline_index >= traces.size())
        throw Error("power_sweep_compare: baseline index out of range");
    const PowerTrace& base = traces[baseline_index];
    for (const PowerTrace& t : traces) {
        if (t.freqs.size() != base.freqs.size() || t.freqs != base.freqs)
            throw Error("power_sweep_compare: traces use mismatched frequency grids");
    }
    Q3dbResult base_q = q_3db(base.freqs, base.y12);
    double base_peak = base.y12.cwiseAbs().maxCoeff();

    PowerSweepReport rep;
    rep.tolerance = tolerance;
    for (const PowerTrace& t : traces) {
        double peak = t.y12.cwiseAbs().maxCoeff();
        Q3dbResult q = q_3db(t.freqs, t.y12);
        rep.levels.push_back(t.level_dbm);
        rep.peak_admittance_drift.push_back(100.0 * (peak / base_peak - 1.0));
        rep.q3db_drift.push_back(100.0 * (q.q3db / base_q.q3db - 1.0));
    }
    double last_peak = std::abs(rep.peak_admittance_drift.back());
    double last_q = std::abs(rep.q3db_drift.back());
    rep.returned_to_baseline = last_peak <= 100.0 * tolerance && last_q <= 100.0 * tolerance;
    return rep;
}

}  // namespace saw
