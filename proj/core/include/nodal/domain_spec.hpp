#pragma once

#include <string>

#include "nodal/geometry.hpp"

namespace nodal {

// Domain spec files are JSON objects:
//   {"vertices": [[x,y],...],
//    "kind": "generic" | "obtuse-triangle" | "lip",
//    "lip_params": {"a": ..., "b": ...}}
// "kind" defaults to "generic"; "lip_params" is required for kind "lip".
geo::Domain parse_domain_spec(const std::string& json_text);
geo::Domain load_domain_spec(const std::string& path);
std::string domain_spec_to_json(const geo::Domain& d);

std::string kind_name(geo::DomainKind k);

}  // namespace nodal
