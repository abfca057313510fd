#ifndef SRCOORD_JACOBIAN_HPP
#define SRCOORD_JACOBIAN_HPP

#include "srcoord/group.hpp"

namespace srcoord {

struct JacobianReport {
    std::vector<std::vector<Poly>> matrix; // (m+n) x (m+n), rows = images
    Poly det;
};

Poly poly_det(const CtxPtr& ctx, const std::vector<std::vector<Poly>>& mat);

// Partials with respect to (y_1..y_m, z_1..z_n); x and the u's are scalars.
JacobianReport jacobian(const Endo& e);

} // namespace srcoord

#endif
