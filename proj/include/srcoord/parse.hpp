#ifndef SRCOORD_PARSE_HPP
#define SRCOORD_PARSE_HPP

#include "srcoord/poly.hpp"

#include <string>

namespace srcoord {

struct ParseError : Error {
    size_t position;
    ParseError(size_t pos, const std::string& msg)
        : Error("ParseError", msg + " (at position " + std::to_string(pos) + ")"), position(pos)
    {
    }
};

// Grammar: expr := term (('+'|'-') term)*
//          term := factor ('*' factor)*
//          factor := base ('^' ['-'] digits)?
//          base := number | name | '(' expr ')' | ('+'|'-') factor
// Numbers are integers or rationals a/b; names resolve through the context;
// '^' exponents are integers, negative only on x.
Poly parse_poly(const std::string& text, const CtxPtr& ctx);

} // namespace srcoord

#endif
