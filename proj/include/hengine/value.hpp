// Primitive attribute values and their textual literal form.
#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace hengine {

enum class PrimType { String, Int, Float, Bool };

/// Runtime value of an attribute, parameter, or expression.
/// Alternative order mirrors PrimType so type_of() is a plain index cast.
using Value = std::variant<std::string, std::int64_t, double, bool>;

inline PrimType type_of(const Value& v) { return static_cast<PrimType>(v.index()); }

Value default_value(PrimType t);

const char* type_name(PrimType t);

/// Renders v as a literal the expression grammar parses back to the same
/// value: strings quoted and escaped, floats always with '.' or exponent.
std::string to_literal(const Value& v);

std::string escape_string(const std::string& s);

/// Equality with int→float widening; all other cross-type pairs are unequal.
bool value_equal(const Value& a, const Value& b);

}  // namespace hengine
