#include "iqho/specfun.hpp"

namespace iqho {

HermiteCache::HermiteCache(int max_n) : max_n_(max_n) {
  if (max_n < 0) throw DomainError("HermiteCache: negative max_n");
  table_.reserve(static_cast<std::size_t>(max_n) + 1);
  table_.push_back({integer(1)});
  if (max_n >= 1) table_.push_back({integer(0), integer(2)});
  for (int n = 2; n <= max_n; ++n) {
    const auto& a = table_[n - 1];
    const auto& b = table_[n - 2];
    std::vector<integer> c(static_cast<std::size_t>(n) + 1);
    for (std::size_t k = 0; k < a.size(); ++k) c[k + 1] += 2 * a[k];
    for (std::size_t k = 0; k < b.size(); ++k) c[k] -= 2 * (n - 1) * b[k];
    table_.push_back(std::move(c));
  }
}

const std::vector<HermiteCache::integer>& HermiteCache::coefficients(int n) const {
  check_hermite_degree(n, max_n_);
  return table_[static_cast<std::size_t>(n)];
}

const HermiteCache& HermiteCache::instance() {
  static const HermiteCache cache;
  return cache;
}

void check_hermite_degree(int n, int max_n) {
  if (n < 0) throw DomainError("Hermite degree must be non-negative");
  if (n > max_n) {
    throw DegreeTooLarge("Hermite degree " + std::to_string(n) + " exceeds the configured maximum " +
                         std::to_string(max_n));
  }
}

}  // namespace iqho
