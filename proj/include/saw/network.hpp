#ifndef SAW_NETWORK_HPP
#define SAW_NETWORK_HPP

#include <vector>

#include "saw/types.hpp"

namespace saw {

enum class ParamKind { S, Y };

/// Frequency-sampled two-port network parameters. Immutable by convention:
/// every operation returns a fresh value.
struct NetworkData {
    VectorXd freqs;                    // Hz, strictly increasing
    std::vector<Matrix2cd> params;     // one 2x2 matrix per frequency
    ParamKind kind = ParamKind::S;
    double z0 = 50.0;                  // reference impedance, ohms

    /// Throws Error on any invariant violation.
    void validate() const;

    Eigen::Index size() const { return freqs.size(); }

    /// Extracts one matrix element as a contiguous trace.
    VectorXcd element(int row, int col) const;
};

struct PassivityWarning {
    Eigen::Index index;
    double freq;
    double sigma_max;  // largest singular value of S at this point
};

/// Points where the S matrix is non-passive beyond 1e-6. Only meaningful for
/// kind = S; returns empty otherwise.
std::vector<PassivityWarning> passivity_warnings(const NetworkData& net);

/// Y = (1/z0)(I - S)(I + S)^-1. Throws Error naming the frequency when
/// (I + S) is singular.
NetworkData s_to_y(const NetworkData& net);

/// S = (I - z0 Y)(I + z0 Y)^-1, inverse of s_to_y.
NetworkData y_to_s(const NetworkData& net);

enum class ElementKind { None, Inductor, Capacitor };

struct LSectionElement {
    ElementKind kind = ElementKind::None;
    double value = 0.0;  // henry or farad
};

/// Ideal lossless two-element matching network synthesized at a single
/// frequency. shunt_at_source selects which canonical form was used: the
/// shunt element sits at the measurement plane and the series element next
/// to the device, or the other way round.
struct LSection {
    bool shunt_at_source = true;
    LSectionElement series_element;
    LSectionElement shunt_element;
    double f0 = 0.0;
};

/// Designs the L-section transforming load impedance zin to real z0 at f0.
/// Throws Error when Re{zin} <= 0.
LSection design_lsection(Complex zin, double z0, double f0);

/// Reflection seen through the L-section at frequency f for load reflection
/// coefficient s11 (referenced to z0).
Complex lsection_reflection(const LSection& sec, Complex s11, double z0, double f);

/// Input S11 trace seen through an ideal L-section matched at f0. The
/// network is synthesized once at f0 and applied across the whole grid with
/// frequency-dependent element reactances. S11 is replaced; the remaining
/// matrix entries are passed through untouched.
NetworkData conjugate_match(const NetworkData& net, double f0);

}  // namespace saw

#endif
