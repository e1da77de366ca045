// sawkit: resonator design and extraction front end.
//
// Subcommands: fit, kpi, sweep, design, tcf, power. All numeric output is
// printed with 12 significant digits so repeated runs are byte-identical.
// Exit codes: 0 success, 2 parse error, 3 fit non-convergence, 4 no guided
// modes, 5 I/O error, 1 anything else.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "saw/dispersion.hpp"
#include "saw/kpi.hpp"
#include "saw/materials.hpp"
#include "saw/mbvd.hpp"
#include "saw/network.hpp"
#include "saw/touchstone.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitNoConverge = 3;
constexpr int kExitNoModes = 4;
constexpr int kExitIo = 5;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

/// Minimal deterministic JSON writer: insertion-ordered key/value pairs.
class JsonObject {
public:
    void add(const std::string& key, double v) { items_.push_back({key, num(v)}); }
    void add(const std::string& key, bool v) { items_.push_back({key, v ? "true" : "false"}); }
    void add(const std::string& key, int v) { items_.push_back({key, std::to_string(v)}); }
    void add_raw(const std::string& key, std::string json) {
        items_.push_back({key, std::move(json)});
    }
    void add(const std::string& key, const std::string& s) {
        items_.push_back({key, "\"" + s + "\""});
    }
    std::string str(int indent = 0) const {
        std::string pad(indent, ' ');
        std::string inner(indent + 2, ' ');
        std::string out = "{\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            out += inner + "\"" + items_[i].first + "\": " + items_[i].second;
            if (i + 1 < items_.size()) out += ",";
            out += "\n";
        }
        out += pad + "}";
        return out;
    }

private:
    std::vector<std::pair<std::string, std::string>> items_;
};

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path);
    if (!out) throw saw::IoError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw saw::IoError("failed writing output file '" + path + "'");
}

saw::NetworkData read_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw saw::IoError("cannot open input file '" + path + "'");
    try {
        return saw::parse_touchstone(in);
    } catch (const saw::ParseError& e) {
        throw saw::ParseError(std::string(e.what()) + " (file '" + path + "')");
    }
}

/// Y12 trace with the sign convention normalized so the resonance appears as
/// an admittance peak with positive real part (series-element embeddings
/// produce Y12 = -Y of the device).
saw::VectorXcd extract_y12(const saw::NetworkData& net) {
    saw::NetworkData y = net.kind == saw::ParamKind::S ? saw::s_to_y(net) : net;
    saw::VectorXcd y12 = y.element(0, 1);
    Eigen::Index peak = 0;
    y12.cwiseAbs().maxCoeff(&peak);
    if (y12[peak].real() < 0.0) y12 = -y12;
    return y12;
}

struct FitOutcome {
    saw::FitReport report;
    saw::ResonatorKpis kpis;
};

FitOutcome run_fit(const saw::NetworkData& net) {
    saw::VectorXcd y12 = extract_y12(net);
    saw::MbvdParams guess = saw::initial_guess(net.freqs, y12);
    FitOutcome out;
    out.report = saw::fit_mbvd(net.freqs, y12, guess);
    out.kpis = saw::derived_kpis(out.report.params);
    saw::Q3dbResult q = saw::q_3db(net.freqs, y12);
    out.kpis.bw3db = q.bw3db;
    out.kpis.q3db = q.q3db;
    return out;
}

JsonObject fit_json(const FitOutcome& o) {
    JsonObject params;
    params.add("Rm_ohm", o.report.params.Rm);
    params.add("Lm_H", o.report.params.Lm);
    params.add("Cm_F", o.report.params.Cm);
    params.add("C0_F", o.report.params.C0);
    params.add("R0_ohm", o.report.params.R0);
    params.add("Rs_ohm", o.report.params.Rs);
    JsonObject kpis;
    kpis.add("fs_Hz", o.kpis.fs);
    kpis.add("fp_Hz", o.kpis.fp);
    kpis.add("bw3db_Hz", o.kpis.bw3db);
    kpis.add("q3db", o.kpis.q3db);
    kpis.add("qm", o.kpis.qm);
    kpis.add("kt2", o.kpis.kt2);
    kpis.add("fom", o.kpis.fom);
    if (!std::isnan(o.kpis.qbode)) kpis.add("qbode", o.kpis.qbode);
    JsonObject root;
    root.add_raw("params", params.str(2));
    root.add("residual_S", o.report.residual);
    root.add("iterations", o.report.iterations);
    root.add("converged", o.report.converged);
    root.add_raw("kpis", kpis.str(2));
    return root;
}

std::string fit_csv(const FitOutcome& o) {
    std::ostringstream os;
    os << "key,value\n";
    os << "Rm_ohm," << num(o.report.params.Rm) << "\n";
    os << "Lm_H," << num(o.report.params.Lm) << "\n";
    os << "Cm_F," << num(o.report.params.Cm) << "\n";
    os << "C0_F," << num(o.report.params.C0) << "\n";
    os << "R0_ohm," << num(o.report.params.R0) << "\n";
    os << "Rs_ohm," << num(o.report.params.Rs) << "\n";
    os << "residual_S," << num(o.report.residual) << "\n";
    os << "iterations," << o.report.iterations << "\n";
    os << "converged," << (o.report.converged ? 1 : 0) << "\n";
    os << "fs_Hz," << num(o.kpis.fs) << "\n";
    os << "fp_Hz," << num(o.kpis.fp) << "\n";
    os << "bw3db_Hz," << num(o.kpis.bw3db) << "\n";
    os << "q3db," << num(o.kpis.q3db) << "\n";
    os << "qm," << num(o.kpis.qm) << "\n";
    os << "kt2," << num(o.kpis.kt2) << "\n";
    os << "fom," << num(o.kpis.fom) << "\n";
    if (!std::isnan(o.kpis.qbode)) os << "qbode," << num(o.kpis.qbode) << "\n";
    return os.str();
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        double start, step, stop;
        char c1, c2;
        std::istringstream is(text);
        if (!(is >> start >> c1 >> step >> c2 >> stop) || c1 != ':' || c2 != ':' ||
            !(step > 0.0) || stop < start)
            throw saw::Error("bad grid spec '" + text + "' (want start:step:stop)");
        for (double v = start; v <= stop + 0.5 * step; v += step) out.push_back(v);
        // snap back values that drifted past the endpoint
        if (!out.empty() && out.back() > stop) out.back() = stop;
    } else {
        std::istringstream is(text);
        std::string tok;
        while (std::getline(is, tok, ',')) {
            if (tok.empty()) continue;
            out.push_back(std::stod(tok));
        }
    }
    if (out.empty()) throw saw::Error("empty grid spec '" + text + "'");
    return out;
}

saw::MaterialDb load_db(const std::string& flag) {
    std::string path = flag;
    if (path.empty()) {
        const char* env = std::getenv("SAWKIT_MATERIALS");
        if (env) path = env;
    }
    if (path.empty())
        throw saw::IoError("no materials database (use --materials or SAWKIT_MATERIALS)");
    return saw::load_materials_file(path);
}

saw::StackDesign make_design(const saw::MaterialDb& db, double sc, double coverage,
                             double lambda) {
    saw::StackDesign d;
    d.piezo = saw::interpolate_scaln(db, sc);
    d.substrate = db.find("6H-SiC");
    d.electrode = db.find("AlSiCu");
    d.coverage = coverage;
    d.lambda = lambda;
    return d;
}

std::string sweep_csv(const saw::SweepResult& r) {
    std::ostringstream os;
    os << "h_over_lambda,tm_over_lambda,vp,kt2,fs_for_lambda\n";
    for (const saw::DesignPoint& p : r.points) {
        os << num(p.h_over_lambda) << "," << num(p.tm_over_lambda) << ",";
        if (p.valid)
            os << num(p.vp) << "," << num(p.kt2) << "," << num(p.fs_for_lambda);
        else
            os << ",,";
        os << "\n";
    }
    return os.str();
}

JsonObject point_json(const saw::DesignPoint& p) {
    JsonObject o;
    o.add("h_over_lambda", p.h_over_lambda);
    o.add("tm_over_lambda", p.tm_over_lambda);
    o.add("vp_m_per_s", p.vp);
    o.add("kt2", p.kt2);
    o.add("fs_for_lambda_Hz", p.fs_for_lambda);
    o.add("valid", p.valid);
    return o;
}

std::string sweep_json(const saw::SweepResult& r) {
    std::string out = "{\n  \"points\": [\n";
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        out += "    " + point_json(r.points[i]).str(4);
        if (i + 1 < r.points.size()) out += ",";
        out += "\n";
    }
    out += "  ],\n  \"best\": " + point_json(r.best).str(2) + "\n}\n";
    return out;
}

int run(int argc, char** argv) {
    CLI::App app{"Sezawa-mode resonator design and KPI extraction toolkit"};
    app.require_subcommand(1);

    std::vector<std::string> inputs;
    std::string output;
    std::string format = "json";
    std::string materials_path;
    std::string grid_h = "0.3:0.05:1.0";
    std::string grid_tm = "0.025:0.025:0.325";
    std::string qbode_csv;
    double lambda = 400e-9;
    double sc = 0.3;
    double coverage = 0.5;
    double tolerance = 0.02;
    double tm_over_lambda = 0.125;
    double h_over_lambda = 0.625;
    int window = 11;
    int threads = 0;
    std::size_t baseline_index = 0;
    std::vector<double> temps;
    std::vector<double> powers;

    auto add_io = [&](CLI::App* cmd, bool multi) {
        if (multi)
            cmd->add_option("--input", inputs, "input Touchstone file(s)")->required();
        else
            cmd->add_option("--input", inputs, "input Touchstone file")
                ->required()
                ->expected(1);
        cmd->add_option("--output", output, "output path ('-' = stdout)");
        cmd->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    CLI::App* cfit = app.add_subcommand("fit", "fit the six-element equivalent circuit");
    add_io(cfit, false);

    CLI::App* ckpi = app.add_subcommand("kpi", "full KPI set including Bode Q");
    add_io(ckpi, false);
    ckpi->add_option("--window", window, "Bode-Q smoothing window, odd points");
    ckpi->add_option("--qbode-csv", qbode_csv, "also write the Q(f) trace as CSV");

    auto add_design_opts = [&](CLI::App* cmd) {
        cmd->add_option("--materials", materials_path, "materials database JSON");
        cmd->add_option("--lambda", lambda, "acoustic wavelength, m");
        cmd->add_option("--sc", sc, "scandium doping fraction");
        cmd->add_option("--coverage", coverage, "electrode area coverage");
        cmd->add_option("--output", output, "output path ('-' = stdout)");
        cmd->add_option("--format", format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--threads", threads, "sweep worker threads (0 = auto)");
    };

    CLI::App* csweep = app.add_subcommand("sweep", "kt2 grid over (h/lambda, tm/lambda)");
    add_design_opts(csweep);
    csweep->add_option("--grid-h", grid_h, "film grid: start:step:stop or v1,v2,...");
    csweep->add_option("--grid-tm", grid_tm, "electrode grid: start:step:stop or v1,v2,...");

    CLI::App* cdesign = app.add_subcommand("design", "single design point evaluation");
    add_design_opts(cdesign);
    cdesign->add_option("--film-h", h_over_lambda, "film thickness / lambda");
    cdesign->add_option("--tm", tm_over_lambda, "electrode thickness / lambda");

    CLI::App* ctcf = app.add_subcommand("tcf", "temperature coefficient of frequency");
    add_io(ctcf, true);
    ctcf->add_option("--temps", temps, "temperature per input file, K")->required();

    CLI::App* cpower = app.add_subcommand("power", "power-sweep degradation report");
    add_io(cpower, true);
    cpower->add_option("--powers", powers, "input power per file, dBm")->required();
    cpower->add_option("--baseline-index", baseline_index, "index of the baseline trace");
    cpower->add_option("--tolerance", tolerance, "return-to-baseline tolerance, fraction");

    CLI11_PARSE(app, argc, argv);

    if (cfit->parsed() || ckpi->parsed()) {
        saw::NetworkData net = read_network(inputs[0]);
        FitOutcome o = run_fit(net);
        if (ckpi->parsed()) {
            if (net.kind != saw::ParamKind::S)
                throw saw::Error("kpi: Bode Q needs S-parameter input");
            saw::NetworkData matched = saw::conjugate_match(net, o.kpis.fs);
            saw::VectorXd q = saw::bode_q_trace(matched.freqs, matched.element(0, 0), window);
            saw::BodeQPeak peak = saw::bode_q_peak(matched.freqs, q, o.kpis.fs, o.kpis.bw3db);
            o.kpis.qbode = peak.q;
            if (!qbode_csv.empty()) {
                std::ostringstream os;
                os << "freq_Hz,qbode\n";
                for (Eigen::Index i = 0; i < q.size(); ++i)
                    os << num(matched.freqs[i]) << "," << num(q[i]) << "\n";
                write_output(qbode_csv, os.str());
            }
        }
        write_output(output, format == "csv" ? fit_csv(o) : fit_json(o).str() + "\n");
        return o.report.converged ? kExitOk : kExitNoConverge;
    }

    if (csweep->parsed() || cdesign->parsed()) {
        saw::MaterialDb db = load_db(materials_path);
        saw::StackDesign design = make_design(db, sc, coverage, lambda);
        if (cdesign->parsed()) {
            grid_h = num(h_over_lambda);
            grid_tm = num(tm_over_lambda);
        }
        std::vector<double> hs = parse_grid(grid_h);
        std::vector<double> tms = parse_grid(grid_tm);
        saw::VectorXd hv = Eigen::Map<saw::VectorXd>(hs.data(), static_cast<Eigen::Index>(hs.size()));
        saw::VectorXd tv = Eigen::Map<saw::VectorXd>(tms.data(), static_cast<Eigen::Index>(tms.size()));
        saw::SweepResult r = saw::sweep_design(design, hv, tv, threads);
        if (cdesign->parsed()) {
            write_output(output, point_json(r.best).str() + "\n");
        } else {
            write_output(output, format == "csv" ? sweep_csv(r) : sweep_json(r));
        }
        return kExitOk;
    }

    if (ctcf->parsed()) {
        if (temps.size() != inputs.size())
            throw saw::Error("tcf: --temps count must match --input count");
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            FitOutcome o = run_fit(read_network(inputs[i]));
            if (!o.report.converged) return kExitNoConverge;
            pts.push_back({temps[i], o.kpis.fs});
        }
        double tcf1 = saw::tcf_fit(pts);
        JsonObject root;
        root.add("tcf1_ppm_per_K", tcf1);
        write_output(output, format == "csv" ? "key,value\ntcf1_ppm_per_K," + num(tcf1) + "\n"
                                             : root.str() + "\n");
        return kExitOk;
    }

    if (cpower->parsed()) {
        if (powers.size() != inputs.size())
            throw saw::Error("power: --powers count must match --input count");
        std::vector<saw::PowerTrace> traces;
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            saw::NetworkData net = read_network(inputs[i]);
            traces.push_back({powers[i], net.freqs, extract_y12(net)});
        }
        saw::PowerSweepReport rep = saw::power_sweep_compare(traces, baseline_index, tolerance);
        if (format == "csv") {
            std::ostringstream os;
            os << "level_dbm,peak_admittance_drift_pct,q3db_drift_pct\n";
            for (std::size_t i = 0; i < rep.levels.size(); ++i)
                os << num(rep.levels[i]) << "," << num(rep.peak_admittance_drift[i]) << ","
                   << num(rep.q3db_drift[i]) << "\n";
            os << "returned_to_baseline," << (rep.returned_to_baseline ? 1 : 0) << ",\n";
            write_output(output, os.str());
        } else {
            std::string levels = "[", pdrift = "[", qdrift = "[";
            for (std::size_t i = 0; i < rep.levels.size(); ++i) {
                std::string sep = i + 1 < rep.levels.size() ? ", " : "";
                levels += num(rep.levels[i]) + sep;
                pdrift += num(rep.peak_admittance_drift[i]) + sep;
                qdrift += num(rep.q3db_drift[i]) + sep;
            }
            JsonObject root;
            root.add_raw("levels_dbm", levels + "]");
            root.add_raw("peak_admittance_drift_pct", pdrift + "]");
            root.add_raw("q3db_drift_pct", qdrift + "]");
            root.add("returned_to_baseline", rep.returned_to_baseline);
            root.add("tolerance", rep.tolerance);
            write_output(output, root.str() + "\n");
        }
        return kExitOk;
    }

    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const saw::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitParse;
    } catch (const saw::NoModesError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNoModes;
    } catch (const saw::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
