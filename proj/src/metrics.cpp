#include "hse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace hse {

namespace mp = boost::multiprecision;

namespace {

void require_order(int order) {
  if (order < 1) throw DomainError("moment order must be >= 1");
}

Index dense_size(Index dim, int order, Index cap) {
  const std::uint64_t size = checked_pow(dim, static_cast<unsigned>(order));
  if (size > cap) {
    throw CapacityError("dense moment of size " + std::to_string(size) + " exceeds cap " + std::to_string(cap) +
                        "; use the Gram-sum path");
  }
  return static_cast<Index>(size);
}

double inverse_sym_dim(Index dim, int order) { return 1.0 / static_cast<double>(sym_dim(dim, order)); }

// k-fold Kronecker power of a vector, big-endian over tensor factors.
CVector tensor_power(const CVector& v, int order) {
  CVector result = v;
  for (int i = 1; i < order; ++i) {
    CVector next(result.size() * v.size());
    for (Eigen::Index a = 0; a < result.size(); ++a) next.segment(a * v.size(), v.size()) = result[a] * v;
    result = std::move(next);
  }
  return result;
}

// Multiply |g|^2 powers into the running sums: sums[k-1] += sum |g|^{2k}.
void add_overlap_powers(const CMatrix& overlaps, bool strict_upper, std::span<double> sums,
                        std::span<const int> orders) {
  if (orders.empty()) return;
  const int k_top = *std::max_element(orders.begin(), orders.end());
  std::vector<double> local(static_cast<std::size_t>(k_top), 0.0);
  for (Eigen::Index c = 0; c < overlaps.cols(); ++c) {
    const Eigen::Index rows = strict_upper ? c : overlaps.rows();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double p = std::norm(overlaps(r, c));
      double power = p;
      for (int k = 1; k <= k_top; ++k) {
        local[static_cast<std::size_t>(k - 1)] += power;
        power *= p;
      }
    }
  }
  for (int k : orders) sums[static_cast<std::size_t>(k - 1)] += 2.0 * local[static_cast<std::size_t>(k - 1)];
}

}  // namespace

std::uint64_t sym_dim(Index dim, int order) {
  if (dim < 1) throw DomainError("dimension must be >= 1");
  require_order(order);
  mp::cpp_int result = 1;
  const mp::cpp_int n = mp::cpp_int(dim) + order - 1;
  for (int i = 1; i <= order; ++i) result = result * (n - order + i) / i;
  if (result > std::numeric_limits<std::uint64_t>::max()) throw CapacityError("symmetric dimension overflows");
  return result.convert_to<std::uint64_t>();
}

MomentMatrix haar_moment_dense(Index dim, int order, Index cap) {
  require_order(order);
  const Index size = dense_size(dim, order, cap);
  const auto n = static_cast<Eigen::Index>(size);
  CMatrix sum = CMatrix::Zero(n, n);

  std::vector<int> perm(static_cast<std::size_t>(order));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<Index> digits(static_cast<std::size_t>(order));
  double denominator = 1.0;
  for (int i = 0; i < order; ++i) denominator *= static_cast<double>(dim + static_cast<Index>(i));

  do {
    for (Index row = 0; row < size; ++row) {
      Index rest = row;
      for (int f = order - 1; f >= 0; --f) {
        digits[static_cast<std::size_t>(f)] = rest % dim;
        rest /= dim;
      }
      // |a_1 ... a_k><a_pi(1) ... a_pi(k)|
      Index col = 0;
      for (int f = 0; f < order; ++f) col = col * dim + digits[static_cast<std::size_t>(perm[static_cast<std::size_t>(f)])];
      sum(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += 1.0;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  return {dim, order, sum / denominator};
}

MomentMatrix temporal_moment_dense(std::span<const CVector> states, int order, Index cap) {
  require_order(order);
  if (states.empty()) throw DomainError("temporal moment of an empty ensemble");
  const Index dim = static_cast<Index>(states.front().size());
  const auto n = static_cast<Eigen::Index>(dense_size(dim, order, cap));
  CMatrix sum = CMatrix::Zero(n, n);
  for (const CVector& psi : states) {
    if (static_cast<Index>(psi.size()) != dim) throw DomainError("ensemble states have different dimensions");
    const CVector v = tensor_power(psi, order);
    sum.selfadjointView<Eigen::Lower>().rankUpdate(v);
  }
  CMatrix full = sum.selfadjointView<Eigen::Lower>();
  return {dim, order, full / static_cast<double>(states.size())};
}

double hs_distance_sq(const MomentMatrix& a, const MomentMatrix& b) {
  if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols()) {
    throw DomainError("moment matrices have different dimensions");
  }
  return (a.matrix - b.matrix).squaredNorm();
}

// Sum of v v^dagger over Sym^k coordinates of psi^{(x)k}. Coordinates are the
// sorted multi-indices i_1 <= ... <= i_k with weight sqrt(k!/prod m_j!), so
// <v(phi)|v(psi)> = <phi|psi>^k.
class TemporalEnsemble::SymmetricMoment {
 public:
  SymmetricMoment(Index dim, int order) : order_(order) {
    std::vector<Index> tuple(static_cast<std::size_t>(order), 0);
    double k_factorial = std::tgamma(order + 1.0);
    while (true) {
      indices_.insert(indices_.end(), tuple.begin(), tuple.end());
      double multiplicity_product = 1.0;
      std::size_t run = 1;
      for (std::size_t i = 1; i <= tuple.size(); ++i) {
        if (i < tuple.size() && tuple[i] == tuple[i - 1]) {
          ++run;
        } else {
          multiplicity_product *= std::tgamma(static_cast<double>(run) + 1.0);
          run = 1;
        }
      }
      weights_.push_back(std::sqrt(k_factorial / multiplicity_product));
      // Next non-decreasing tuple.
      int pos = order - 1;
      while (pos >= 0 && tuple[static_cast<std::size_t>(pos)] == dim - 1) --pos;
      if (pos < 0) break;
      const Index value = tuple[static_cast<std::size_t>(pos)] + 1;
      for (int i = pos; i < order; ++i) tuple[static_cast<std::size_t>(i)] = value;
    }
    const auto n = static_cast<Eigen::Index>(weights_.size());
    moment_ = CMatrix::Zero(n, n);
  }

  void add(const CMatrix& states) {
    if (order_ == 1) {
      moment_.selfadjointView<Eigen::Lower>().rankUpdate(states);
      return;
    }
    const auto n = static_cast<Eigen::Index>(weights_.size());
    CMatrix coords(n, states.cols());
    const auto k = static_cast<std::size_t>(order_);
    for (Eigen::Index c = 0; c < states.cols(); ++c) {
      for (Eigen::Index m = 0; m < n; ++m) {
        const Index* idx = &indices_[static_cast<std::size_t>(m) * k];
        Complex value = weights_[static_cast<std::size_t>(m)];
        for (std::size_t f = 0; f < k; ++f) value *= states(static_cast<Eigen::Index>(idx[f]), c);
        coords(m, c) = value;
      }
    }
    moment_.selfadjointView<Eigen::Lower>().rankUpdate(coords);
  }

  double frobenius_sq() const {
    double diag = 0.0;
    double off = 0.0;
    for (Eigen::Index c = 0; c < moment_.cols(); ++c) {
      diag += std::norm(moment_(c, c));
      for (Eigen::Index r = c + 1; r < moment_.rows(); ++r) off += std::norm(moment_(r, c));
    }
    return diag + 2.0 * off;
  }

 private:
  int order_;
  std::vector<Index> indices_;
  std::vector<double> weights_;
  CMatrix moment_;
};

TemporalEnsemble::TemporalEnsemble(Index dim, int k_max, EnsembleOptions options)
    : dim_(dim), k_max_(k_max), retain_(options.retain_states) {
  if (dim < 1) throw DomainError("ensemble dimension must be >= 1");
  require_order(k_max);
  gram_sums_.assign(static_cast<std::size_t>(k_max), 0.0);
  moments_.resize(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    if (sym_dim(dim, k) <= options.moment_dim_limit) {
      moments_[static_cast<std::size_t>(k - 1)] = std::make_unique<SymmetricMoment>(dim, k);
    } else {
      retain_ = true;
    }
  }
}

TemporalEnsemble::~TemporalEnsemble() = default;
TemporalEnsemble::TemporalEnsemble(TemporalEnsemble&&) noexcept = default;
TemporalEnsemble& TemporalEnsemble::operator=(TemporalEnsemble&&) noexcept = default;

bool TemporalEnsemble::uses_moment_route(int order) const {
  if (order < 1 || order > k_max_) throw DomainError("moment order not tracked by this ensemble");
  return moments_[static_cast<std::size_t>(order - 1)] != nullptr;
}

void TemporalEnsemble::accumulate(std::span<const Complex> state) {
  if (state.size() != dim_) throw DomainError("state dimension does not match ensemble");
  CMatrix block(static_cast<Eigen::Index>(dim_), 1);
  for (Index i = 0; i < dim_; ++i) block(static_cast<Eigen::Index>(i), 0) = state[i];
  accumulate_block(block);
}

void TemporalEnsemble::accumulate(const CVector& state) {
  accumulate(std::span<const Complex>(state.data(), static_cast<Index>(state.size())));
}

void TemporalEnsemble::accumulate_block(const CMatrix& states) {
  if (static_cast<Index>(states.rows()) != dim_) throw DomainError("state dimension does not match ensemble");
  const Eigen::Index b = states.cols();
  if (b == 0) return;

  std::vector<int> gram_orders;
  for (int k = 1; k <= k_max_; ++k) {
    if (!moments_[static_cast<std::size_t>(k - 1)]) gram_orders.push_back(k);
  }
  if (!gram_orders.empty()) {
    const auto previous = static_cast<Eigen::Index>(count_);
    if (previous > 0) {
      Eigen::Map<const CMatrix> past(stored_.data(), static_cast<Eigen::Index>(dim_), previous);
      const CMatrix cross = past.adjoint() * states;
      add_overlap_powers(cross, false, gram_sums_, gram_orders);
    }
    const CMatrix inner = states.adjoint() * states;
    add_overlap_powers(inner, true, gram_sums_, gram_orders);
    // Diagonal terms: |<psi|psi>|^{2k} = 1 for unit states.
    for (Eigen::Index c = 0; c < b; ++c) {
      const double p = std::norm(inner(c, c));
      double power = p;
      for (int k = 1; k <= k_max_; ++k) {
        if (!moments_[static_cast<std::size_t>(k - 1)]) gram_sums_[static_cast<std::size_t>(k - 1)] += power;
        power *= p;
      }
    }
  }
  for (auto& moment : moments_) {
    if (moment) moment->add(states);
  }
  if (retain_) stored_.insert(stored_.end(), states.data(), states.data() + states.size());
  count_ += static_cast<std::uint64_t>(b);
}

double TemporalEnsemble::power_sum(int order) const {
  if (order < 1 || order > k_max_) throw DomainError("moment order not tracked by this ensemble");
  const auto& moment = moments_[static_cast<std::size_t>(order - 1)];
  return moment ? moment->frobenius_sq() : gram_sums_[static_cast<std::size_t>(order - 1)];
}

Eigen::Map<const CMatrix> TemporalEnsemble::states() const {
  const Eigen::Index cols = retain_ ? static_cast<Eigen::Index>(count_) : 0;
  return {stored_.data(), static_cast<Eigen::Index>(dim_), cols};
}

double TemporalEnsemble::max_leakage(std::span<const Index> sector) const {
  if (!retain_) throw DomainError("leakage check needs retained states");
  std::vector<bool> member(dim_, false);
  for (Index i : sector) {
    if (i >= dim_) throw DomainError("sector index out of range");
    member[i] = true;
  }
  const auto view = states();
  double worst = 0.0;
  for (Eigen::Index c = 0; c < view.cols(); ++c) {
    double outside = 0.0;
    for (Index i = 0; i < dim_; ++i) {
      if (!member[i]) outside += std::norm(view(static_cast<Eigen::Index>(i), c));
    }
    worst = std::max(worst, outside);
  }
  return worst;
}

double delta_gram(const TemporalEnsemble& ensemble, int order, Index effective_dim) {
  if (ensemble.count() == 0) throw DomainError("distance of an empty ensemble");
  if (effective_dim < 1) throw DomainError("effective dimension must be >= 1");
  const double t = static_cast<double>(ensemble.count());
  return ensemble.power_sum(order) / (t * t) - inverse_sym_dim(effective_dim, order);
}

double bound_B(Index dim) {
  if (dim < 2) throw DomainError("bound needs D >= 2");
  const double d = static_cast<double>(dim);
  return 1.0 / (d + 1.0) - 1.0 / std::sqrt(2.0 * d * (d + 1.0));
}

double hs_lower_bound(Index dim) {
  const double b = bound_B(dim);
  return 4.0 * b * b / static_cast<double>(dim);
}

double cross_haar_distance(Index dim, Index sub_dim, int order) {
  if (sub_dim < 1) throw DomainError("subspace dimension must be >= 1");
  if (sub_dim > dim) throw DomainError("subspace dimension exceeds the full dimension");
  if (sub_dim == dim) return 0.0;
  return inverse_sym_dim(sub_dim, order) - inverse_sym_dim(dim, order);
}

}  // namespace hse
