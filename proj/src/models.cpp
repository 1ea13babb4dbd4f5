#include "hse/models.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "hse/haar.hpp"

namespace hse {

namespace {

double max_abs(const CMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

CMatrix two_site_projector_onto(const CVector& v) { return v * v.adjoint(); }

CVector pair_ket(int local_dim, int a, int b) {
  const Eigen::Index n = static_cast<Eigen::Index>(local_dim) * local_dim;
  CVector v = CVector::Zero(n);
  v[a * local_dim + b] = 1.0;
  return v;
}

}  // namespace

std::string_view to_string(ProjectorKind kind) {
  switch (kind) {
    case ProjectorKind::P1: return "P1";
    case ProjectorKind::P2: return "P2";
    case ProjectorKind::Pexp: return "Pexp";
    case ProjectorKind::Plin: return "Plin";
  }
  return "?";
}

ProjectorKind parse_projector_kind(std::string_view name) {
  if (name == "P1") return ProjectorKind::P1;
  if (name == "P2") return ProjectorKind::P2;
  if (name == "Pexp") return ProjectorKind::Pexp;
  if (name == "Plin") return ProjectorKind::Plin;
  throw DomainError("unknown projector kind '" + std::string(name) + "'");
}

std::string to_string(const ModelFamily& family) {
  switch (family.kind) {
    case FamilyKind::Generic: return "generic";
    case FamilyKind::Scar: return "scar(" + std::string(to_string(family.projector)) + ")";
    case FamilyKind::PairFlip: return "pair_flip";
  }
  return "?";
}

Projector::Projector(int local_dim, CMatrix matrix) : local_dim_(local_dim), matrix_(std::move(matrix)) {
  const Eigen::Index n = static_cast<Eigen::Index>(local_dim) * local_dim;
  if (matrix_.rows() != n || matrix_.cols() != n) throw DomainError("projector must be d^2 x d^2");
  if (max_abs(matrix_ - matrix_.adjoint()) > 1e-12) throw DomainError("projector is not Hermitian");
  if (max_abs(matrix_ * matrix_ - matrix_) > 1e-12) throw DomainError("projector is not idempotent");
}

void CircuitModel::step(std::span<Complex> amplitudes, DriveLabel label) const {
  apply_layer_in_place(amplitudes, n_sites, local_dim, even(label).matrix(), LayerParity::Even);
  apply_layer_in_place(amplitudes, n_sites, local_dim, odd(label).matrix(), LayerParity::Odd);
}

void CircuitModel::step(StateVector& state, DriveLabel label) const {
  if (state.n_sites() != n_sites || state.local_dim() != local_dim) {
    throw DomainError("state does not match circuit geometry");
  }
  auto& amps = state.amplitudes();
  step(std::span<Complex>(amps.data(), static_cast<Index>(amps.size())), label);
}

CMatrix random_hermitian(Index m, Rng& rng) {
  if (m < 1) throw DomainError("Hermitian dimension must be >= 1");
  const auto n = static_cast<Eigen::Index>(m);
  CMatrix g(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double re = rng.uniform();
      const double im = rng.uniform();
      g(r, c) = Complex(re, im);
    }
  }
  CMatrix h = 0.5 * (g + g.adjoint());
  // Exact Hermiticity: average leaves the diagonal with a zero imaginary part
  // only up to rounding, so clear it explicitly.
  for (Eigen::Index i = 0; i < n; ++i) h(i, i) = Complex(h(i, i).real(), 0.0);
  return h;
}

LocalGate unitary_from_generator(const CMatrix& h, int sign) {
  if (h.rows() != h.cols()) throw DomainError("generator must be square");
  if (max_abs(h - h.adjoint()) > 1e-10) throw DomainError("generator is not Hermitian");
  if (sign != 1 && sign != -1) throw DomainError("sign must be +1 or -1");
  const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(h.rows()))));
  if (static_cast<Eigen::Index>(d) * d != h.rows()) throw DomainError("generator size is not d^2");

  const CMatrix sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  const CMatrix& v = solver.eigenvectors();
  CVector phases(v.cols());
  for (Eigen::Index i = 0; i < v.cols(); ++i) {
    phases[i] = std::polar(1.0, static_cast<double>(sign) * solver.eigenvalues()[i]);
  }
  CMatrix u = v * phases.asDiagonal() * v.adjoint();
  return LocalGate(d, std::move(u));
}

Projector scar_projector(ProjectorKind kind, int local_dim) {
  if (local_dim < 2) throw DomainError("projector needs d >= 2");
  if ((kind == ProjectorKind::Pexp || kind == ProjectorKind::Plin) && local_dim < 3) {
    throw DomainError("Pexp and Plin need d >= 3");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(local_dim) * local_dim;
  CMatrix p = CMatrix::Identity(n, n);
  p -= two_site_projector_onto(pair_ket(local_dim, 0, 0));
  switch (kind) {
    case ProjectorKind::P1:
      break;
    case ProjectorKind::P2:
      p -= two_site_projector_onto(pair_ket(local_dim, 1, 1));
      break;
    case ProjectorKind::Pexp:
      p -= two_site_projector_onto(pair_ket(local_dim, 1, 1));
      p -= two_site_projector_onto(pair_ket(local_dim, 0, 1));
      p -= two_site_projector_onto(pair_ket(local_dim, 1, 0));
      break;
    case ProjectorKind::Plin: {
      p -= two_site_projector_onto(pair_ket(local_dim, 1, 1));
      // |+-> - |-+> = 2(|10> - |01>) with |+-> = |0> +- |1>; normalized here.
      CVector phi = pair_ket(local_dim, 1, 0) - pair_ket(local_dim, 0, 1);
      phi /= phi.norm();
      p -= two_site_projector_onto(phi);
      break;
    }
  }
  return Projector(local_dim, std::move(p));
}

LocalGate scar_embedded_gate(const CMatrix& h, const Projector& p) {
  if (h.rows() != p.matrix().rows() || h.cols() != p.matrix().cols()) {
    throw DomainError("generator and projector dimensions differ");
  }
  const CMatrix& proj = p.matrix();
  const CMatrix php = proj * h * proj;
  const LocalGate full = unitary_from_generator(0.5 * (php + php.adjoint()), +1);
  // exp(iPHP) commutes with P; writing it as (I - P) + P exp(iPHP) P keeps
  // the kernel of P fixed to rounding of P itself rather than of the solver.
  const CMatrix identity = CMatrix::Identity(proj.rows(), proj.cols());
  return LocalGate(p.local_dim(), (identity - proj) + proj * full.matrix() * proj);
}

CMatrix bond_projector_sum(const Projector& p, int n_sites) {
  if (n_sites < 2) throw DomainError("need at least two sites");
  const int d = p.local_dim();
  const auto dim = static_cast<Eigen::Index>(hilbert_dim(n_sites, d));
  CMatrix sum = CMatrix::Zero(dim, dim);
  for (int bond = 0; bond + 1 < n_sites; ++bond) {
    // Apply the projector to every basis column: columns of P_bond.
    CMatrix embedded = CMatrix::Identity(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c) {
      apply_two_site_gate_in_place(std::span<Complex>(embedded.col(c).data(), static_cast<Index>(dim)), n_sites,
                                   d, p.matrix(), bond);
    }
    sum += embedded;
  }
  return sum;
}

CMatrix scar_subspace_basis(const Projector& p, int n_sites, Index dense_cap) {
  const Index dim = hilbert_dim(n_sites, p.local_dim());
  if (dim > dense_cap) throw CapacityError("scar subspace search exceeds the dense cap");
  const CMatrix sum = bond_projector_sum(p, n_sites);
  Eigen::JacobiSVD<CMatrix> svd(sum, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double threshold = 1e-9 * (sv.size() > 0 ? sv[0] : 0.0);
  Eigen::Index rank = 0;
  while (rank < sv.size() && sv[rank] > threshold) ++rank;
  return svd.matrixV().rightCols(sv.size() - rank);
}

Index scar_dimension(const Projector& p, int n_sites, Index dense_cap) {
  return static_cast<Index>(scar_subspace_basis(p, n_sites, dense_cap).cols());
}

LocalGate pair_flip_gate(int local_dim, Rng& rng) {
  if (local_dim < 2) throw DomainError("pair-flip gate needs d >= 2");
  const Eigen::Index d = local_dim;
  const CMatrix block = sample_haar_unitary(static_cast<Index>(d), rng);
  CMatrix u = CMatrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) {
      if (a == b) {
        for (Eigen::Index c = 0; c < d; ++c) u(a * d + a, c * d + c) = block(a, c);
      } else {
        u(a * d + b, a * d + b) = std::polar(1.0, 2.0 * std::numbers::pi * rng.uniform());
      }
    }
  }
  return LocalGate(local_dim, std::move(u));
}

CircuitModel build_circuit(const ModelFamily& family, int n_sites, int local_dim, Rng& rng) {
  if (n_sites < 2) throw DomainError("circuit needs at least two sites");
  if (local_dim < 2) throw DomainError("circuit needs d >= 2");
  const Index pair = static_cast<Index>(local_dim) * static_cast<Index>(local_dim);

  auto draw = [&]() -> LocalGate {
    switch (family.kind) {
      case FamilyKind::Generic:
        return unitary_from_generator(random_hermitian(pair, rng), -1);
      case FamilyKind::Scar: {
        const Projector p = scar_projector(family.projector, local_dim);
        return scar_embedded_gate(random_hermitian(pair, rng), p);
      }
      case FamilyKind::PairFlip:
        return pair_flip_gate(local_dim, rng);
    }
    throw DomainError("unknown model family");
  };
  // Sequenced explicitly so the draw order is fixed.
  LocalGate even_a = draw();
  LocalGate odd_a = draw();
  LocalGate even_b = draw();
  LocalGate odd_b = draw();
  return CircuitModel{n_sites, local_dim, family, {std::move(even_a), std::move(odd_a), std::move(even_b), std::move(odd_b)}};
}

}  // namespace hse
