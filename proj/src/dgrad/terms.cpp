#include "dgmd/dgrad/terms.hpp"

namespace dgmd {

TermDG<3> angle_dg(DGVariant variant, const AngleParams& params, const std::array<Vec3, 3>& q,
                   const std::array<Vec3, 3>& q_prime, const Box& box) {
    return distance_dg<3>(AngleDistancePotential{params}, angle_distance_pairs, unwrap_term(q, box),
                          unwrap_term(q_prime, box), variant);
}

TermDG<4> dihedral_dg(DGVariant variant, const TorsionParams& params, const std::array<Vec3, 4>& q,
                      const std::array<Vec3, 4>& q_prime, DihedralKind /*kind*/, const Box& box) {
    // Improper terms use the same six-distance construction; only the atom order differs.
    return distance_dg<4>(DihedralDistancePotential{params}, dihedral_distance_pairs,
                          unwrap_term(q, box), unwrap_term(q_prime, box), variant);
}

} // namespace dgmd
