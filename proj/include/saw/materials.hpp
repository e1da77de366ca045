#ifndef SAW_MATERIALS_HPP
#define SAW_MATERIALS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "saw/types.hpp"

namespace saw {

/// Isotropic-equivalent acoustic constants of one material.
struct Material {
    std::string name;
    double density = 0.0;  // kg/m^3
    double vL = 0.0;       // longitudinal bulk velocity, m/s
    double vT = 0.0;       // shear bulk velocity, m/s
    double K2 = 0.0;       // intrinsic piezoelectric coupling, fraction

    /// Throws Error (naming the material) on invariant violation.
    void validate() const;

    /// Longitudinal velocity with piezoelectric stiffening, vL * sqrt(1 + K2).
    double stiffened_vL() const;
};

struct ScalnNode {
    double sc = 0.0;  // scandium fraction in [0, 1]
    Material material;
};

struct MaterialDb {
    std::vector<Material> materials;   // by name, order as loaded
    std::vector<ScalnNode> scaln_nodes;  // strictly increasing in sc

    /// Throws Error when `name` is absent.
    const Material& find(const std::string& name) const;
};

/// Loads and validates the JSON material database. Errors carry the JSON
/// path or entry name. Schema:
///   {"materials": [{"name", "density", "vL", "vT", "K2"}],
///    "scaln_nodes": [{"sc", "material"}]}
MaterialDb load_materials(std::istream& in);
MaterialDb load_materials_file(const std::string& path);

/// Piecewise-linear interpolation of all constants between the bracketing
/// scandium-doping nodes. Throws Error outside the node range.
Material interpolate_scaln(const MaterialDb& db, double sc);

}  // namespace saw

#endif
