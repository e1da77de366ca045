#include "saw/materials.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "json.hpp"

namespace saw {

void Material::validate() const {
    if (name.empty()) throw Error("material: empty name");
    std::string where = "material '" + name + "': ";
    if (!(density > 0.0)) throw Error(where + "density must be positive");
    if (!(vT > 0.0) || !(vT < vL)) throw Error(where + "need 0 < vT < vL");
    if (K2 < 0.0 || K2 >= 1.0) throw Error(where + "K2 must lie in [0, 1)");
}

double Material::stiffened_vL() const { return vL * std::sqrt(1.0 + K2); }

const Material& MaterialDb::find(const std::string& name) const {
    for (const Material& m : materials)
        if (m.name == name) return m;
    throw Error("material database: unknown material '" + name + "'");
}

namespace {

double require_number(const nlohmann::json& obj, const char* key, const std::string& path) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw ParseError("materials: missing or non-numeric '" + std::string(key) + "' at " +
                         path);
    return obj[key].get<double>();
}

}  // namespace

MaterialDb load_materials(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("materials: invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("materials") || !doc["materials"].is_array())
        throw ParseError("materials: missing 'materials' array at document root");

    MaterialDb db;
    std::size_t idx = 0;
    for (const auto& entry : doc["materials"]) {
        std::string path = "/materials/" + std::to_string(idx++);
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
            throw ParseError("materials: missing 'name' at " + path);
        Material m;
        m.name = entry["name"].get<std::string>();
        m.density = require_number(entry, "density", path);
        m.vL = require_number(entry, "vL", path);
        m.vT = require_number(entry, "vT", path);
        m.K2 = require_number(entry, "K2", path);
        m.validate();
        db.materials.push_back(std::move(m));
    }

    if (doc.contains("scaln_nodes")) {
        if (!doc["scaln_nodes"].is_array())
            throw ParseError("materials: 'scaln_nodes' must be an array");
        idx = 0;
        for (const auto& entry : doc["scaln_nodes"]) {
            std::string path = "/scaln_nodes/" + std::to_string(idx++);
            if (!entry.is_object() || !entry.contains("material") ||
                !entry["material"].is_string())
                throw ParseError("materials: missing 'material' at " + path);
            ScalnNode node;
            node.sc = require_number(entry, "sc", path);
            if (node.sc < 0.0 || node.sc > 1.0)
                throw ParseError("materials: sc outside [0,1] at " + path);
            node.material = db.find(entry["material"].get<std::string>());
            if (!db.scaln_nodes.empty() && !(node.sc > db.scaln_nodes.back().sc))
                throw ParseError("materials: node dopings must be strictly increasing at " +
                                 path);
            db.scaln_nodes.push_back(std::move(node));
        }
        if (db.scaln_nodes.size() == 1)
            throw ParseError("materials: need at least 2 scaln_nodes for interpolation");
    }
    return db;
}

MaterialDb load_materials_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("materials: cannot open '" + path + "'");
    try {
        return load_materials(in);
    } catch (const ParseError& e) {
        throw ParseError(std::string(e.what()) + " (file '" + path + "')");
    }
}

Material interpolate_scaln(const MaterialDb& db, double sc) {
    if (db.scaln_nodes.size() < 2)
        throw Error("interpolate_scaln: database has no doping nodes");
    const auto& nodes = db.scaln_nodes;
    if (sc < nodes.front().sc || sc > nodes.back().sc)
        throw Error("interpolate_scaln: doping outside the tabulated range");
    std::size_t hi = 1;
    while (hi + 1 < nodes.size() && nodes[hi].sc < sc) ++hi;
    const ScalnNode& a = nodes[hi - 1];
    const ScalnNode& b = nodes[hi];
    double t = (sc - a.sc) / (b.sc - a.sc);
    Material out;
    std::ostringstream name;
    name << "ScAlN@" << sc;
    out.name = name.str();
    out.density = a.material.density + t * (b.material.density - a.material.density);
    out.vL = a.material.vL + t * (b.material.vL - a.material.vL);
    out.vT = a.material.vT + t * (b.material.vT - a.material.vT);
    out.K2 = a.material.K2 + t * (b.material.K2 - a.material.K2);
    out.validate();
    return out;
}

}  // namespace saw
