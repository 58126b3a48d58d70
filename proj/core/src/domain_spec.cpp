#include "nodal/domain_spec.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace nodal {

using nlohmann::json;

std::string kind_name(geo::DomainKind k) {
    switch (k) {
        case geo::DomainKind::obtuse_triangle: return "obtuse-triangle";
        case geo::DomainKind::lip: return "lip";
        default: return "generic";
    }
}

geo::Domain parse_domain_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("domain spec: ") + e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw ParseError("domain spec: missing \"vertices\" array");

    std::vector<geo::Point2> verts;
    for (const auto& v : j["vertices"]) {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ParseError("domain spec: vertices must be [x,y] number pairs");
        verts.push_back({v[0].get<double>(), v[1].get<double>()});
    }

    geo::DomainKind kind = geo::DomainKind::generic;
    if (j.contains("kind")) {
        if (!j["kind"].is_string()) throw ParseError("domain spec: \"kind\" must be a string");
        std::string k = j["kind"].get<std::string>();
        if (k == "generic") kind = geo::DomainKind::generic;
        else if (k == "obtuse-triangle") kind = geo::DomainKind::obtuse_triangle;
        else if (k == "lip") kind = geo::DomainKind::lip;
        else throw ParseError("domain spec: unknown kind \"" + k + "\"");
    }

    std::optional<geo::LipParams> lip;
    if (kind == geo::DomainKind::lip) {
        if (!j.contains("lip_params") || !j["lip_params"].is_object() ||
            !j["lip_params"].contains("a") || !j["lip_params"].contains("b"))
            throw ParseError("domain spec: kind \"lip\" requires lip_params {a, b}");
        lip = geo::LipParams{j["lip_params"]["a"].get<double>(),
                             j["lip_params"]["b"].get<double>()};
    }

    return geo::build_polygon(std::move(verts), kind, lip);
}

geo::Domain load_domain_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open domain spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_domain_spec(ss.str());
}

std::string domain_spec_to_json(const geo::Domain& d) {
    json j;
    json verts = json::array();
    for (const auto& v : d.vertices()) verts.push_back({v.x, v.y});
    j["vertices"] = verts;
    j["kind"] = kind_name(d.kind());
    if (d.lip_params())
        j["lip_params"] = {{"a", d.lip_params()->a}, {"b", d.lip_params()->b}};
    return j.dump(2);
}

}  // namespace nodal
