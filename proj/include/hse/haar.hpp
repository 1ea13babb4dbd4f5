#pragma once

#include <span>

#include "hse/rng.hpp"
#include "hse/types.hpp"

namespace hse {

// Normalized i.i.d. standard complex Gaussian vector of length dim.
CVector sample_haar_state(Index dim, Rng& rng);

// Haar state on span{|i> : i in basis_indices}, zero elsewhere.
// Throws on an empty set, duplicates, or indices >= dim.
CVector sample_haar_state_in_subspace(std::span<const Index> basis_indices, Index dim, Rng& rng);

// Haar-distributed m x m unitary: QR of a Ginibre matrix with the columns
// rescaled by the phases of diag(R), which removes the QR gauge bias.
CMatrix sample_haar_unitary(Index m, Rng& rng);

}  // namespace hse
