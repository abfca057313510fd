#include "srcoord/parse.hpp"

#include <cctype>

namespace srcoord {

namespace {

class Parser {
public:
    Parser(const std::string& text, CtxPtr ctx) : s_(text), ctx_(std::move(ctx)) {}

    Poly run()
    {
        Poly p = expr();
        skip_ws();
        if (pos_ != s_.size())
            throw ParseError(pos_, "unexpected trailing input");
        return p;
    }

private:
    Poly expr()
    {
        Poly acc = term();
        for (;;) {
            skip_ws();
            if (accept('+')) acc += term();
            else if (accept('-')) acc -= term();
            else return acc;
        }
    }

    Poly term()
    {
        Poly acc = factor();
        for (;;) {
            skip_ws();
            if (accept('*')) acc = acc * factor();
            else return acc;
        }
    }

    Poly factor()
    {
        Poly b = base();
        skip_ws();
        if (!accept('^')) return b;
        skip_ws();
        bool neg = accept('-');
        size_t at = pos_;
        long k = integer_literal();
        if (neg) k = -k;
        if (k >= 0) return b.pow(static_cast<int>(k));
        // Negative exponents are Laurent shifts, legal only on a pure x-power.
        if (b == Poly::x_power(ctx_, 1))
            return Poly::x_power(ctx_, static_cast<int>(k));
        throw ParseError(at, "negative exponent allowed only on x");
    }

    Poly base()
    {
        skip_ws();
        if (accept('(')) {
            Poly p = expr();
            skip_ws();
            if (!accept(')'))
                throw ParseError(pos_, "expected ')'");
            return p;
        }
        if (accept('-')) return -factor();
        if (accept('+')) return factor();
        if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            return number();
        return name();
    }

    Poly number()
    {
        size_t at = pos_;
        Integer num(digits());
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == '/') {
            size_t save = pos_;
            ++pos_;
            skip_ws();
            if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                Integer den(digits());
                if (den == 0)
                    throw ParseError(at, "zero denominator");
                return Poly::constant(ctx_, fraction(num, den));
            }
            pos_ = save; // '/' belonged to something else; we do not support it
            throw ParseError(pos_, "expected digits after '/'");
        }
        return Poly::constant(ctx_, Rational(num));
    }

    Poly name()
    {
        size_t at = pos_;
        std::string id;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            id += s_[pos_++];
        if (id.empty())
            throw ParseError(at, "expected a number, variable, or '('");
        if (id == ctx_->xname)
            return Poly::x_power(ctx_, 1);
        if (auto v = ctx_->resolve(id))
            return Poly::variable(ctx_, *v);
        throw ParseError(at, "unknown variable '" + id + "'");
    }

    std::string digits()
    {
        std::string d;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            d += s_[pos_++];
        if (d.empty())
            throw ParseError(pos_, "expected digits");
        return d;
    }

    long integer_literal() { return std::stol(digits()); }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    const std::string& s_;
    CtxPtr ctx_;
    size_t pos_ = 0;
};

} // namespace

Poly parse_poly(const std::string& text, const CtxPtr& ctx)
{
    return Parser(text, ctx).run();
}

} // namespace srcoord
