#include "saw/touchstone.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>

namespace saw {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

[[noreturn]] void fail(int line, const std::string& msg) {
    std::ostringstream os;
    os << "touchstone: line " << line << ": " << msg;
    throw ParseError(os.str());
}

struct Options {
    double unit_scale = 1e9;  // GHz default per the v1 standard
    char param = 'S';
    TouchstoneFormat format = TouchstoneFormat::MA;
    double z0 = 50.0;
};

Options parse_option_line(const std::string& text, int line) {
    Options opt;
    std::istringstream is(text);
    std::string tok;
    is >> tok;  // leading '#'
    while (is >> tok) {
        std::string t = lower(tok);
        if (t == "hz") opt.unit_scale = 1.0;
        else if (t == "khz") opt.unit_scale = 1e3;
        else if (t == "mhz") opt.unit_scale = 1e6;
        else if (t == "ghz") opt.unit_scale = 1e9;
        else if (t == "s") opt.param = 'S';
        else if (t == "y") opt.param = 'Y';
        else if (t == "z") opt.param = 'Z';
        else if (t == "ri") opt.format = TouchstoneFormat::RI;
        else if (t == "ma") opt.format = TouchstoneFormat::MA;
        else if (t == "db") opt.format = TouchstoneFormat::DB;
        else if (t == "r") {
            if (!(is >> opt.z0) || !(opt.z0 > 0.0))
                fail(line, "invalid reference impedance after 'R'");
        } else {
            fail(line, "unknown option token '" + tok + "'");
        }
    }
    return opt;
}

Complex from_pair(double a, double b, TouchstoneFormat fmt) {
    switch (fmt) {
        case TouchstoneFormat::RI:
            return {a, b};
        case TouchstoneFormat::MA:
            return std::polar(a, b * kPi / 180.0);
        case TouchstoneFormat::DB:
            return std::polar(std::pow(10.0, a / 20.0), b * kPi / 180.0);
    }
    return {};
}

}  // namespace

NetworkData parse_touchstone(std::istream& in, std::vector<PassivityWarning>* warnings) {
    NetworkData net;
    bool have_options = false;
    Options opt;
    std::vector<double> freqs;
    std::vector<Matrix2cd> mats;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string text = raw;
        if (auto pos = text.find('!'); pos != std::string::npos) text.erase(pos);
        auto first = text.find_first_not_of(" \t\r\n");
        if (first == std::string::npos) continue;
        if (text[first] == '[')
            fail(line, "Touchstone v2 keywords are not supported (v1 only)");
        if (text[first] == '#') {
            if (have_options) fail(line, "duplicate option line");
            opt = parse_option_line(text.substr(first), line);
            have_options = true;
            continue;
        }
        if (!have_options) fail(line, "data before the '#' option line");
        std::istringstream is(text);
        std::vector<double> vals;
        double v;
        while (is >> v) vals.push_back(v);
        std::string trailing;
        if (is.clear(), is >> trailing) fail(line, "non-numeric token '" + trailing + "'");
        if (vals.size() != 9) {
            std::ostringstream os;
            os << "expected 9 columns, got " << vals.size();
            fail(line, os.str());
        }
        double f = vals[0] * opt.unit_scale;
        if (!freqs.empty() && f <= freqs.back())
            fail(line, "non-monotonic frequency (noise-parameter sections are not supported)");
        Matrix2cd m;
        // v1 two-port column order: 11, 21, 12, 22
        m(0, 0) = from_pair(vals[1], vals[2], opt.format);
        m(1, 0) = from_pair(vals[3], vals[4], opt.format);
        m(0, 1) = from_pair(vals[5], vals[6], opt.format);
        m(1, 1) = from_pair(vals[7], vals[8], opt.format);
        if (opt.param == 'Z') {
            Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
            if (std::abs(det) == 0.0) fail(line, "singular Z matrix, cannot convert to Y");
            Matrix2cd inv;
            inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
            m = inv / det;
        }
        freqs.push_back(f);
        mats.push_back(m);
    }
    if (!have_options) throw ParseError("touchstone: missing '#' option line");
    net.freqs = Eigen::Map<const VectorXd>(freqs.data(), static_cast<Eigen::Index>(freqs.size()));
    net.params = std::move(mats);
    net.kind = (opt.param == 'S') ? ParamKind::S : ParamKind::Y;
    net.z0 = opt.z0;
    net.validate();
    if (warnings) *warnings = passivity_warnings(net);
    return net;
}

NetworkData parse_touchstone(const std::string& text, std::vector<PassivityWarning>* warnings) {
    std::istringstream is(text);
    return parse_touchstone(is, warnings);
}

std::string serialize_touchstone(const NetworkData& net, TouchstoneFormat format) {
    if (net.freqs.size() == 0) throw Error("serialize_touchstone: empty network");
    if (static_cast<Eigen::Index>(net.params.size()) != net.freqs.size())
        throw Error("serialize_touchstone: params length does not match frequency grid");
    std::ostringstream os;
    const char* fmt_tok = format == TouchstoneFormat::RI   ? "RI"
                          : format == TouchstoneFormat::MA ? "MA"
                                                           : "DB";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", net.z0);
    os << "# Hz " << (net.kind == ParamKind::S ? 'S' : 'Y') << ' ' << fmt_tok << " R " << buf
       << '\n';
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << ' ' << buf;
    };
    for (Eigen::Index i = 0; i < net.freqs.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", net.freqs[i]);
        os << buf;
        const Matrix2cd& m = net.params[i];
        const Complex entries[4] = {m(0, 0), m(1, 0), m(0, 1), m(1, 1)};
        for (const Complex& c : entries) {
            switch (format) {
                case TouchstoneFormat::RI:
                    emit(c.real());
                    emit(c.imag());
                    break;
                case TouchstoneFormat::MA:
                    emit(std::abs(c));
                    emit(std::arg(c) * 180.0 / kPi);
                    break;
                case TouchstoneFormat::DB:
                    emit(20.0 * std::log10(std::abs(c)));
                    emit(std::arg(c) * 180.0 / kPi);
                    break;
            }
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace saw
