#include "saw/network.hpp"

#include <cmath>
#include <sstream>

namespace saw {

void NetworkData::validate() const {
    if (freqs.size() < 2) throw Error("NetworkData: need at least 2 frequency points");
    if (static_cast<Eigen::Index>(params.size()) != freqs.size())
        throw Error("NetworkData: params length does not match frequency grid");
    if (z0 <= 0.0) throw Error("NetworkData: reference impedance must be positive");
    for (Eigen::Index i = 0; i < freqs.size(); ++i) {
        if (!(freqs[i] > 0.0)) throw Error("NetworkData: frequencies must be positive");
        if (i > 0 && !(freqs[i] > freqs[i - 1]))
            throw Error("NetworkData: frequencies must be strictly increasing");
    }
}

VectorXcd NetworkData::element(int row, int col) const {
    VectorXcd out(freqs.size());
    for (Eigen::Index i = 0; i < freqs.size(); ++i) out[i] = params[i](row, col);
    return out;
}

std::vector<PassivityWarning> passivity_warnings(const NetworkData& net) {
    std::vector<PassivityWarning> out;
    if (net.kind != ParamKind::S) return out;
    for (Eigen::Index i = 0; i < net.freqs.size(); ++i) {
        Eigen::JacobiSVD<Matrix2cd> svd(net.params[i]);
        double smax = svd.singularValues()[0];
        if (smax > 1.0 + 1e-6) out.push_back({i, net.freqs[i], smax});
    }
    return out;
}

namespace {

Matrix2cd invert_checked(const Matrix2cd& m, double freq, const char* what) {
    Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    double scale = m.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-12 * std::max(1.0, scale * scale)) {
        std::ostringstream os;
        os << what << " singular at f = " << freq << " Hz";
        throw Error(os.str());
    }
    Matrix2cd inv;
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    return inv / det;
}

}  // namespace

NetworkData s_to_y(const NetworkData& net) {
    net.validate();
    if (net.kind != ParamKind::S) throw Error("s_to_y: input must be S-parameters");
    NetworkData out = net;
    out.kind = ParamKind::Y;
    const Matrix2cd ident = Matrix2cd::Identity();
    for (Eigen::Index i = 0; i < net.freqs.size(); ++i) {
        const Matrix2cd& s = net.params[i];
        Matrix2cd inv = invert_checked(ident + s, net.freqs[i], "s_to_y: (I + S)");
        out.params[i] = (1.0 / net.z0) * (ident - s) * inv;
    }
    return out;
}

NetworkData y_to_s(const NetworkData& net) {
    net.validate();
    if (net.kind != ParamKind::Y) throw Error("y_to_s: input must be Y-parameters");
    NetworkData out = net;
    out.kind = ParamKind::S;
    const Matrix2cd ident = Matrix2cd::Identity();
    for (Eigen::Index i = 0; i < net.freqs.size(); ++i) {
        Matrix2cd zy = net.z0 * net.params[i];
        Matrix2cd inv = invert_checked(ident + zy, net.freqs[i], "y_to_s: (I + z0 Y)");
        out.params[i] = (ident - zy) * inv;
    }
    return out;
}

namespace {

LSectionElement series_from_reactance(double x, double w0) {
    if (std::abs(x) < 1e-12) return {ElementKind::None, 0.0};
    if (x > 0.0) return {ElementKind::Inductor, x / w0};
    return {ElementKind::Capacitor, -1.0 / (w0 * x)};
}

LSectionElement shunt_from_susceptance(double b, double w0) {
    if (std::abs(b) < 1e-15) return {ElementKind::None, 0.0};
    if (b > 0.0) return {ElementKind::Capacitor, b / w0};
    return {ElementKind::Inductor, -1.0 / (w0 * b)};
}

double series_reactance(const LSectionElement& el, double w) {
    switch (el.kind) {
        case ElementKind::Inductor: return w * el.value;
        case ElementKind::Capacitor: return -1.0 / (w * el.value);
        default: return 0.0;
    }
}

double shunt_susceptance(const LSectionElement& el, double w) {
    switch (el.kind) {
        case ElementKind::Capacitor: return w * el.value;
        case ElementKind::Inductor: return -1.0 / (w * el.value);
        default: return 0.0;
    }
}

}  // namespace

LSection design_lsection(Complex zin, double z0, double f0) {
    double r = zin.real(), x = zin.imag();
    if (!(r > 0.0)) throw Error("conjugate_match: load has non-positive real part");
    double w0 = 2.0 * kPi * f0;
    LSection sec;
    sec.f0 = f0;
    // Canonical form 1 (shunt at the measurement plane, series next to the
    // device): realizable when R <= z0. Tie-break prefers this form.
    if (r <= z0) {
        sec.shunt_at_source = true;
        double xs = std::sqrt(r * (z0 - r)) - x;
        double b = (x + xs) / (r * z0);
        sec.series_element = series_from_reactance(xs, w0);
        sec.shunt_element = shunt_from_susceptance(b, w0);
        return sec;
    }
    // Canonical form 2 (shunt next to the device): realizable when the load
    // conductance is below 1/z0, which always holds here since r > z0.
    Complex y = 1.0 / zin;
    double g = y.real(), bl = y.imag();
    sec.shunt_at_source = false;
    double btot = std::sqrt(g * (1.0 / z0 - g));
    double b = btot - bl;
    double xs = btot / (g * g + btot * btot);
    sec.shunt_element = shunt_from_susceptance(b, w0);
    sec.series_element = series_from_reactance(xs, w0);
    return sec;
}

Complex lsection_reflection(const LSection& sec, Complex s11, double z0, double f) {
    double w = 2.0 * kPi * f;
    Complex denom = 1.0 - s11;
    Complex zl;
    if (std::abs(denom) < 1e-30) {
        zl = Complex(1e30, 0.0);
    } else {
        zl = z0 * (1.0 + s11) / denom;
    }
    Complex j(0.0, 1.0);
    Complex zin;
    if (sec.shunt_at_source) {
        Complex zs = zl + j * series_reactance(sec.series_element, w);
        Complex yin = 1.0 / zs + j * shunt_susceptance(sec.shunt_element, w);
        zin = 1.0 / yin;
    } else {
        Complex yp = 1.0 / zl + j * shunt_susceptance(sec.shunt_element, w);
        zin = 1.0 / yp + j * series_reactance(sec.series_element, w);
    }
    return (zin - z0) / (zin + z0);
}

NetworkData conjugate_match(const NetworkData& net, double f0) {
    net.validate();
    if (net.kind != ParamKind::S) throw Error("conjugate_match: input must be S-parameters");
    if (f0 < net.freqs[0] || f0 > net.freqs[net.freqs.size() - 1])
        throw Error("conjugate_match: f0 outside the frequency span");
    // nearest grid point defines the design impedance
    Eigen::Index i0 = 0;
    double best = std::abs(net.freqs[0] - f0);
    for (Eigen::Index i = 1; i < net.freqs.size(); ++i) {
        double d = std::abs(net.freqs[i] - f0);
        if (d < best) { best = d; i0 = i; }
    }
    Complex s11_0 = net.params[i0](0, 0);
    Complex zin = net.z0 * (1.0 + s11_0) / (1.0 - s11_0);
    LSection sec = design_lsection(zin, net.z0, net.freqs[i0]);
    NetworkData out = net;
    for (Eigen::Index i = 0; i < net.freqs.size(); ++i)
        out.params[i](0, 0) = lsection_reflection(sec, net.params[i](0, 0), net.z0, net.freqs[i]);
    return out;
}

}  // namespace saw
