#pragma once

#include <optional>
#include <string>
#include <variant>

#include "fbstab/qp.hpp"

namespace fbstab {

using ParsedProblem = std::variant<DenseQP, OcpQP>;

/// Parses a problem document:
///   {"dense": {"H": [[..]], "f": [..], "G": [[..]], "h": [..],
///              "A": [[..]], "b": [..]}}
/// with G/h or A/b optional (absent means no such constraints), or
///   {"ocp": {"N": n, "Q": [..per stage..], "R": .., "S": .., "q": ..,
///            "r": .., "A": .., "B": .., "c": .., "E": .., "L": .., "d": ..,
///            "xi": [..]}}
/// with matrices as arrays of row arrays. Throws std::runtime_error with a
/// message naming the offending field.
ParsedProblem parse_problem_json(const std::string& text);

std::string problem_to_json(const DenseQP& p);
std::string problem_to_json(const OcpQP& p);

}  // namespace fbstab
