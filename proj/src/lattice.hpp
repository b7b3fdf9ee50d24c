#pragma once

// Periodic far-image machinery: sums of Hermite functions over all integer
// image offsets outside the 3x3 tile around the domain, applied to the root
// box as a local expansion. The 3x3 tile itself is handled by the ordinary
// wrapped near/interaction lists.

#include "hermite.hpp"

namespace fgt {

// L_{(g1,g2)} = sum over (j1,j2) in Z^2 with max(|j1|,|j2|) >= 2 of
//   h_{g1}(j1 D / sqrt(delta)) * h_{g2}(j2 D / sqrt(delta)).
// Zero unless g1 and g2 are both even.
double lattice_sum(int g1, int g2, double delta, double domain_side);

// psi_b += (-1)^{|b|} / b! * sum_a phi_a L_{a+b}
void lattice_root_local(const Expansion& phi, double delta, double domain_side,
                        Expansion* psi);

}  // namespace fgt
