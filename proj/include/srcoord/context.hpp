#ifndef SRCOORD_CONTEXT_HPP
#define SRCOORD_CONTEXT_HPP

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace srcoord {

struct Error : std::runtime_error {
    std::string code;
    Error(std::string c, const std::string& msg)
        : std::runtime_error(c + ": " + msg), code(std::move(c))
    {
    }
};

[[noreturn]] inline void fail(const std::string& code, const std::string& msg)
{
    throw Error(code, msg);
}

enum class VarKind { U, Y, Z };

struct VarRef {
    VarKind kind;
    int index; // 0-based within its block

    bool operator==(const VarRef&) const = default;
};

// Ring data for R^{[m+n]} = A[x][y_1..y_m, z_1..z_n] with A = Q[u_1..u_p].
// x is Laurent-localizable; the u's are weight-0 base parameters.
class RingContext {
public:
    int m = 0; // y-variables
    int n = 1; // z-variables
    int p = 0; // base parameters u
    std::string xname = "x";
    std::vector<std::string> unames, ynames, znames;

    static std::shared_ptr<const RingContext> create(int m, int n, int p,
                                                     std::vector<std::string> yn = {},
                                                     std::vector<std::string> zn = {},
                                                     std::vector<std::string> un = {})
    {
        if (m < 0 || n < 1 || p < 0)
            fail("BadContext", "need m >= 0, n >= 1, p >= 0");
        auto ctx = std::make_shared<RingContext>();
        ctx->m = m;
        ctx->n = n;
        ctx->p = p;
        ctx->ynames = defaulted(std::move(yn), m, "y");
        ctx->znames = defaulted(std::move(zn), n, "z");
        ctx->unames = defaulted(std::move(un), p, "u");
        ctx->check_names();
        return ctx;
    }

    int nvars() const { return p + m + n; } // exponent-vector width, excluding x

    // Position of a variable inside the exponent vector (order: u..., y..., z...).
    int slot(VarRef v) const
    {
        switch (v.kind) {
        case VarKind::U: return v.index;
        case VarKind::Y: return p + v.index;
        case VarKind::Z: return p + m + v.index;
        }
        fail("BadVarRef", "corrupt kind");
    }

    VarRef var_at(int s) const
    {
        if (s < p) return {VarKind::U, s};
        if (s < p + m) return {VarKind::Y, s - p};
        if (s < p + m + n) return {VarKind::Z, s - p - m};
        fail("BadVarRef", "slot out of range");
    }

    const std::string& name(VarRef v) const
    {
        switch (v.kind) {
        case VarKind::U: return unames.at(v.index);
        case VarKind::Y: return ynames.at(v.index);
        case VarKind::Z: return znames.at(v.index);
        }
        fail("BadVarRef", "corrupt kind");
    }

    // Resolves a variable name; accepts canonical names plus the numeric
    // aliases y<k>, z<k>, u<k> when those do not clash with canonical names.
    std::optional<VarRef> resolve(const std::string& s) const
    {
        for (int i = 0; i < p; ++i)
            if (unames[i] == s) return VarRef{VarKind::U, i};
        for (int i = 0; i < m; ++i)
            if (ynames[i] == s) return VarRef{VarKind::Y, i};
        for (int i = 0; i < n; ++i)
            if (znames[i] == s) return VarRef{VarKind::Z, i};
        if (s.size() >= 2) {
            char c = s[0];
            bool digits = true;
            for (size_t i = 1; i < s.size(); ++i)
                digits = digits && std::isdigit(static_cast<unsigned char>(s[i]));
            if (digits) {
                int k = std::stoi(s.substr(1)) - 1;
                if (c == 'y' && k >= 0 && k < m) return VarRef{VarKind::Y, k};
                if (c == 'z' && k >= 0 && k < n) return VarRef{VarKind::Z, k};
                if (c == 'u' && k >= 0 && k < p) return VarRef{VarKind::U, k};
            }
        }
        return std::nullopt;
    }

    bool same_as(const RingContext& o) const
    {
        return m == o.m && n == o.n && p == o.p && xname == o.xname && unames == o.unames &&
               ynames == o.ynames && znames == o.znames;
    }

private:
    static std::vector<std::string> defaulted(std::vector<std::string> given, int count,
                                              const std::string& stem)
    {
        if (!given.empty()) {
            if (static_cast<int>(given.size()) != count)
                fail("BadContext", "wrong number of names for " + stem);
            return given;
        }
        std::vector<std::string> names;
        for (int i = 0; i < count; ++i)
            names.push_back(count == 1 ? stem : stem + std::to_string(i + 1));
        return names;
    }

    void check_names() const
    {
        std::vector<std::string> all{xname};
        all.insert(all.end(), unames.begin(), unames.end());
        all.insert(all.end(), ynames.begin(), ynames.end());
        all.insert(all.end(), znames.begin(), znames.end());
        for (size_t i = 0; i < all.size(); ++i)
            for (size_t j = i + 1; j < all.size(); ++j)
                if (all[i] == all[j])
                    fail("BadContext", "duplicate variable name " + all[i]);
    }
};

using CtxPtr = std::shared_ptr<const RingContext>;

inline void require_same_context(const CtxPtr& a, const CtxPtr& b)
{
    if (a == b) return;
    if (a && b && a->same_as(*b)) return;
    fail("ContextMismatch", "operands belong to different ring contexts");
}

} // namespace srcoord

#endif
