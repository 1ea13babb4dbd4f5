#pragma once

#include <array>
#include <string>
#include <string_view>

#include "hse/fibonacci.hpp"
#include "hse/qudit.hpp"
#include "hse/rng.hpp"

namespace hse {

// Two-site projectors used for scar embedding. P1 and P2 remove |00> (and
// |11>); Pexp removes every |ab> with a,b in {0,1}; Plin removes |00>, |11>
// and the normalized antisymmetric state (|01> - |10>)/sqrt(2).
enum class ProjectorKind { P1, P2, Pexp, Plin };

std::string_view to_string(ProjectorKind kind);
ProjectorKind parse_projector_kind(std::string_view name);

class Projector {
 public:
  // Throws unless square d^2 x d^2, Hermitian and idempotent to 1e-12.
  Projector(int local_dim, CMatrix matrix);

  int local_dim() const { return local_dim_; }
  const CMatrix& matrix() const { return matrix_; }

 private:
  int local_dim_;
  CMatrix matrix_;
};

enum class FamilyKind { Generic, Scar, PairFlip };

struct ModelFamily {
  FamilyKind kind = FamilyKind::Generic;
  ProjectorKind projector = ProjectorKind::P1;  // used by Scar only

  static ModelFamily generic() { return {FamilyKind::Generic, ProjectorKind::P1}; }
  static ModelFamily scar(ProjectorKind p) { return {FamilyKind::Scar, p}; }
  static ModelFamily pair_flip() { return {FamilyKind::PairFlip, ProjectorKind::P1}; }
};

std::string to_string(const ModelFamily& family);

// Four bricks plus lattice geometry. One drive step with label X applies the
// even layer of U_e^X and then the odd layer of U_o^X.
struct CircuitModel {
  int n_sites = 0;
  int local_dim = 0;
  ModelFamily family;
  // {U_e^A, U_o^A, U_e^B, U_o^B}
  std::array<LocalGate, 4> bricks;

  const LocalGate& even(DriveLabel label) const { return bricks[label == DriveLabel::A ? 0 : 2]; }
  const LocalGate& odd(DriveLabel label) const { return bricks[label == DriveLabel::A ? 1 : 3]; }

  // psi <- U^(label) psi
  void step(std::span<Complex> amplitudes, DriveLabel label) const;
  void step(StateVector& state, DriveLabel label) const;
};

// (G + G^dagger)/2 with Re G_ij, Im G_ij ~ U[0,1).
CMatrix random_hermitian(Index m, Rng& rng);

// exp(i * sign * H) by eigendecomposition.
LocalGate unitary_from_generator(const CMatrix& h, int sign);

Projector scar_projector(ProjectorKind kind, int local_dim);

// exp(i P H P); every two-site state annihilated by P is a fixed point.
LocalGate scar_embedded_gate(const CMatrix& h, const Projector& p);

// Sum over bonds of the projector embedded at (n, n+1).
CMatrix bond_projector_sum(const Projector& p, int n_sites);

// Orthonormal basis (columns) of the common kernel of all bond projectors.
// Singular values below 1e-9 * largest count as zero.
CMatrix scar_subspace_basis(const Projector& p, int n_sites, Index dense_cap = 4096);

Index scar_dimension(const Projector& p, int n_sites, Index dense_cap = 4096);

// Haar U(d) block on span{|aa>}, independent uniform phases on |ab>, a != b.
LocalGate pair_flip_gate(int local_dim, Rng& rng);

// Four independently drawn bricks. Generic bricks are exp(-iH); scar bricks
// are exp(+iPHP) with H drawn the same way as for the generic family.
CircuitModel build_circuit(const ModelFamily& family, int n_sites, int local_dim, Rng& rng);

}  // namespace hse
