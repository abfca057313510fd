#include "srcoord/jacobian.hpp"

namespace srcoord {

Poly poly_det(const CtxPtr& ctx, const std::vector<std::vector<Poly>>& mat)
{
    size_t n = mat.size();
    if (n == 0) return Poly::one(ctx);
    if (n == 1) return mat[0][0];
    // Laplace expansion along the first column, skipping zero entries.
    Poly det = Poly::zero(ctx);
    for (size_t i = 0; i < n; ++i) {
        if (mat[i][0].is_zero()) continue;
        std::vector<std::vector<Poly>> minor;
        minor.reserve(n - 1);
        for (size_t a = 0; a < n; ++a) {
            if (a == i) continue;
            std::vector<Poly> row(mat[a].begin() + 1, mat[a].end());
            minor.push_back(std::move(row));
        }
        Poly term = mat[i][0] * poly_det(ctx, minor);
        det += (i % 2 == 0) ? term : -term;
    }
    return det;
}

JacobianReport jacobian(const Endo& e)
{
    const auto& ctx = e.ctx();
    int dim = ctx->m + ctx->n;
    JacobianReport rep;
    rep.matrix.assign(dim, std::vector<Poly>(dim, Poly::zero(ctx)));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            VarRef v = j < ctx->m ? VarRef{VarKind::Y, j} : VarRef{VarKind::Z, j - ctx->m};
            rep.matrix[i][j] = e.images()[i].derivative(v);
        }
    }
    rep.det = poly_det(ctx, rep.matrix);
    return rep;
}

} // namespace srcoord
