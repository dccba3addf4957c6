#pragma once

// JSON encodings for exact scalars.
//
// Integers are written as JSON numbers when they fit in 64 bits and as
// decimal strings otherwise. Rationals are always {"num": .., "den": ..}.
// On input a rational may also be a plain integer or a "p/q" string.

#include "hsys/exact.hpp"

#include <json.hpp>

namespace hsys {

using Json = nlohmann::ordered_json;

Json integer_to_json(const Integer& z);
Integer integer_from_json(const Json& j);

Json rational_to_json(const Rational& q);
Rational rational_from_json(const Json& j);

/// Thrown for structurally invalid input documents.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fetches a required member, throwing ParseError naming the key.
const Json& require(const Json& obj, const char* key);

}  // namespace hsys
