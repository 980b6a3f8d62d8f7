#include "hengine/value.hpp"

#include <charconv>

namespace hengine {

Value default_value(PrimType t) {
  switch (t) {
    case PrimType::String: return std::string{};
    case PrimType::Int: return std::int64_t{0};
    case PrimType::Float: return 0.0;
    case PrimType::Bool: return false;
  }
  return std::int64_t{0};
}

const char* type_name(PrimType t) {
  switch (t) {
    case PrimType::String: return "string";
    case PrimType::Int: return "int";
    case PrimType::Float: return "float";
    case PrimType::Bool: return "bool";
  }
  return "?";
}

std::string escape_string(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

static std::string float_literal(double d) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, res.ptr);
  // Keep the literal recognizably a float so it reparses as one.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

bool value_equal(const Value& a, const Value& b) {
  if (a.index() == b.index()) return a == b;
  if (type_of(a) == PrimType::Int && type_of(b) == PrimType::Float) {
    return static_cast<double>(std::get<std::int64_t>(a)) == std::get<double>(b);
  }
  if (type_of(a) == PrimType::Float && type_of(b) == PrimType::Int) {
    return std::get<double>(a) == static_cast<double>(std::get<std::int64_t>(b));
  }
  return false;
}

std::string to_literal(const Value& v) {
  switch (type_of(v)) {
    case PrimType::String: return escape_string(std::get<std::string>(v));
    case PrimType::Int: return std::to_string(std::get<std::int64_t>(v));
    case PrimType::Float: return float_literal(std::get<double>(v));
    case PrimType::Bool: return std::get<bool>(v) ? "true" : "false";
  }
  return "?";
}

}  // namespace hengine
