#pragma once

// Seeded random instances for checks, fixtures and the detector's search.

#include <cstdint>
#include <random>

#include "opsys/system.hpp"

namespace opsys {

using Rng = std::mt19937_64;

double standard_normal(Rng& rng);
cplx complex_normal(Rng& rng);

CMatrix random_complex_matrix(int rows, int cols, Rng& rng);
CMatrix random_hermitian_matrix(int d, Rng& rng);
CMatrix random_unitary(int d, Rng& rng);

/// Orthogonal projection of the given rank onto a Haar-random subspace.
CMatrix random_projection(int d, int rank, Rng& rng);

/// Density matrix with full support (rank = d) unless `rank` is given.
CMatrix random_density_matrix(int d, Rng& rng, int rank = -1);

/// Random Hermitian x ∈ M_n(V) with Gaussian real coordinates in the
/// Hermitian basis of M_n(V).
LevelElement random_hermitian_level(const OperatorSystemSpace& v, int n, Rng& rng);

/// Random (not necessarily Hermitian) element of M_n(V).
LevelElement random_level(const OperatorSystemSpace& v, int n, Rng& rng);

/// span{I, p, extra random Hermitian elements} ⊆ M_d.
OperatorSystemSpace random_system_containing(const CMatrix& p, int extra, Rng& rng);

struct ProjectionInstance {
  SpacePtr v;
  CMatrix p;
};

/// d uniform in [d_min, d_max], p of rank in [1, d - 1], V either M_d or
/// span{I, p, up to 2d random elements}.
ProjectionInstance random_projection_instance(Rng& rng, int d_min, int d_max);

}  // namespace opsys
