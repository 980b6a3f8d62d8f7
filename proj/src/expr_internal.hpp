// Lets the file parser embed expressions in rule bodies on a shared stream.
#pragma once

#include "hengine/expr.hpp"
#include "lexer.hpp"

namespace hengine {

/// Consumes the longest expression starting at the stream position.
ExprPtr parse_expr_stream(lex::Stream& s);

}  // namespace hengine
