#include "hse/krylov.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

namespace hse {

namespace mp = boost::multiprecision;

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(Index n) : parent_(n), rank_(n, 0) { std::iota(parent_.begin(), parent_.end(), Index{0}); }

  Index find(Index x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(Index a, Index b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<Index> parent_;
  std::vector<unsigned char> rank_;
};

std::uint64_t to_u64(const mp::cpp_int& value) {
  if (value < 0 || value > std::numeric_limits<std::uint64_t>::max()) {
    throw CapacityError("formula value does not fit in 64 bits");
  }
  return value.convert_to<std::uint64_t>();
}

mp::cpp_int ipow(int base, int exponent) { return mp::pow(mp::cpp_int(base), static_cast<unsigned>(exponent)); }

mp::cpp_int binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  mp::cpp_int result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

void require_sites(int n_sites) {
  if (n_sites < 1) throw DomainError("need at least one site");
}

}  // namespace

std::size_t KrylovDecomposition::largest_sector_size() const {
  std::size_t best = 0;
  for (const auto& s : sectors) best = std::max(best, s.size());
  return best;
}

std::size_t KrylovDecomposition::singleton_count() const {
  return static_cast<std::size_t>(std::count_if(sectors.begin(), sectors.end(), [](const auto& s) { return s.size() == 1; }));
}

std::vector<std::pair<std::size_t, std::size_t>> KrylovDecomposition::size_histogram() const {
  std::map<std::size_t, std::size_t> counts;
  for (const auto& s : sectors) ++counts[s.size()];
  return {counts.begin(), counts.end()};
}

std::string KrylovDecomposition::to_json() const {
  nlohmann::ordered_json doc;
  doc["n_sites"] = n_sites;
  doc["local_dim"] = local_dim;
  doc["sector_count"] = sectors.size();
  auto list = nlohmann::ordered_json::array();
  for (std::size_t id = 0; id < sectors.size(); ++id) {
    nlohmann::ordered_json entry;
    entry["id"] = id;
    if (labels) entry["staggered_magnetisation"] = (*labels)[id];
    entry["dim"] = sectors[id].size();
    entry["indices"] = sectors[id];
    list.push_back(std::move(entry));
  }
  doc["sectors"] = std::move(list);
  return doc.dump(2);
}

KrylovDecomposition pair_flip_components(int n_sites, int local_dim, Index cap) {
  const Index dim = hilbert_dim(n_sites, local_dim);
  if (dim > cap) throw CapacityError("Krylov decomposition exceeds the basis-size cap");
  const Index d = static_cast<Index>(local_dim);

  DisjointSets sets(dim);
  std::vector<Index> stride(static_cast<std::size_t>(n_sites));
  for (int s = 0; s < n_sites; ++s) stride[static_cast<std::size_t>(s)] = static_cast<Index>(checked_pow(d, static_cast<unsigned>(n_sites - 1 - s)));

  for (Index index = 0; index < dim; ++index) {
    const auto digits = index_to_digits(index, n_sites, local_dim);
    for (int bond = 0; bond + 1 < n_sites; ++bond) {
      const auto left = static_cast<std::size_t>(bond);
      const int a = digits[left];
      if (a != digits[left + 1]) continue;
      const Index pair_stride = stride[left] + stride[left + 1];
      const Index base = index - static_cast<Index>(a) * pair_stride;
      // Linking aa to every bb (b > a) is enough; the rest follows by union.
      for (Index b = static_cast<Index>(a) + 1; b < d; ++b) sets.unite(index, base + b * pair_stride);
    }
  }

  KrylovDecomposition result;
  result.n_sites = n_sites;
  result.local_dim = local_dim;
  result.sector_of.assign(dim, 0);
  std::vector<std::size_t> root_to_sector(dim, static_cast<std::size_t>(-1));
  for (Index index = 0; index < dim; ++index) {
    const Index root = sets.find(index);
    if (root_to_sector[root] == static_cast<std::size_t>(-1)) {
      root_to_sector[root] = result.sectors.size();
      result.sectors.emplace_back();
    }
    const std::size_t id = root_to_sector[root];
    result.sectors[id].push_back(index);
    result.sector_of[index] = id;
  }

  if (local_dim == 2) {
    std::vector<int> labels;
    labels.reserve(result.sectors.size());
    for (const auto& sector : result.sectors) labels.push_back(staggered_sector_label(sector.front(), n_sites));
    result.labels = std::move(labels);
  }
  return result;
}

std::uint64_t count_sectors_formula(int n_sites, int local_dim) {
  require_sites(n_sites);
  if (local_dim == 2) throw DomainError("sector-count formula needs d >= 3; use commutant_dimension for d = 2");
  if (local_dim < 3) throw DomainError("sector-count formula needs d >= 3");
  const mp::cpp_int value = (ipow(local_dim - 1, n_sites + 1) - 1) / (local_dim - 2);
  return to_u64(value);
}

std::uint64_t largest_sector_formula(int n_sites, int local_dim) {
  if (n_sites < 2 || n_sites % 2 != 0) throw DomainError("largest-sector formula needs even N >= 2");
  if (local_dim < 3) throw DomainError("largest-sector formula needs d >= 3");
  const int half = n_sites / 2;
  mp::cpp_rational total = 0;
  for (int k = 1; k <= half; ++k) {
    // Dyck paths of length N with k returns to the root: k/(N-k) C(N-k, N/2).
    // Departures from the root choose among d letters, the others among d-1.
    const mp::cpp_rational ballot(binomial(n_sites - k, half) * k, mp::cpp_int(n_sites - k));
    total += ballot * mp::cpp_rational(ipow(local_dim, k) * ipow(local_dim - 1, half - k));
  }
  if (mp::denominator(total) != 1) throw NumericalError("largest-sector series is not integral");
  return to_u64(mp::numerator(total));
}

std::uint64_t frozen_state_count(int n_sites, int local_dim) {
  require_sites(n_sites);
  if (local_dim < 2) throw DomainError("need d >= 2");
  return to_u64(ipow(local_dim, 1) * ipow(local_dim - 1, n_sites - 1));
}

std::uint64_t commutant_dimension(int n_sites, int local_dim) {
  require_sites(n_sites);
  if (local_dim == 2) return static_cast<std::uint64_t>(n_sites) + 1;
  return count_sectors_formula(n_sites, local_dim);
}

int staggered_sector_label(Index basis_index, int n_sites) {
  require_sites(n_sites);
  if (basis_index >= hilbert_dim(n_sites, 2)) throw DomainError("index is not a qubit basis index");
  int m = 0;
  for (int j = n_sites - 1; j >= 0; --j) {
    const int occupation = static_cast<int>(basis_index & 1U);
    basis_index >>= 1;
    m += (j % 2 == 0 ? 1 : -1) * occupation;
  }
  return m;
}

double leakage(std::span<const Complex> amplitudes, std::span<const Index> sector) {
  std::vector<bool> member(amplitudes.size(), false);
  for (Index i : sector) {
    if (i >= amplitudes.size()) throw DomainError("sector index out of range");
    member[i] = true;
  }
  // Sum the outside weight directly; 1 - inside would cancel for tiny leakage.
  double outside = 0.0;
  for (Index i = 0; i < amplitudes.size(); ++i) {
    if (!member[i]) outside += std::norm(amplitudes[i]);
  }
  return std::clamp(outside, 0.0, 1.0);
}

double leakage(const StateVector& state, std::span<const Index> sector) {
  return leakage(std::span<const Complex>(state.amplitudes().data(), state.dim()), sector);
}

}  // namespace hse
