#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>

namespace riskev::testing {

std::vector<double> exact_shapley(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, std::span<const std::vector<double>> background) {
  const std::size_t n = x.size();
  const std::size_t subsets = std::size_t{1} << n;
  std::vector<double> value(subsets, 0.0);
  std::vector<double> z(n);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double total = 0.0;
    for (const auto& row : background) {
      for (std::size_t i = 0; i < n; ++i) z[i] = (mask >> i) & 1 ? x[i] : row[i];
      total += f(z);
    }
    value[mask] = total / static_cast<double>(background.size());
  }
  std::vector<double> factorial(n + 1, 1.0);
  for (std::size_t i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * static_cast<double>(i);

  std::vector<double> phi(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t mask = 0; mask < subsets; ++mask) {
      if ((mask >> i) & 1) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      const double weight = factorial[s] * factorial[n - s - 1] / factorial[n];
      phi[i] += weight * (value[mask | (std::size_t{1} << i)] - value[mask]);
    }
  }
  return phi;
}

std::vector<double> finite_difference_gradient(const std::function<double(std::span<const double>)>& f,
                                               std::span<const double> x, double h) {
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = point[i];
    point[i] = saved + h;
    const double up = f(point);
    point[i] = saved - h;
    const double down = f(point);
    point[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double exact_permutation_p(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pool(a.begin(), a.end());
  pool.insert(pool.end(), b.begin(), b.end());
  const std::size_t n = pool.size(), m = a.size();
  auto mean = [](std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double observed = std::abs(mean(a) - mean(b));
  const double total = std::accumulate(pool.begin(), pool.end(), 0.0);

  std::vector<bool> pick(n, false);
  std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(m), true);
  std::size_t hits = 0, splits = 0;
  // prev_permutation over a sorted-descending selector walks every m-subset once.
  do {
    double sa = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pick[i]) sa += pool[i];
    }
    const double diff = sa / m - (total - sa) / (n - m);
    if (std::abs(diff) >= observed - 1e-12) ++hits;
    ++splits;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return static_cast<double>(hits) / static_cast<double>(splits);
}

std::vector<std::string> regex_tokens_ascii(const std::string& text) {
  static const std::regex pattern(R"(\b[^\d\W]+\b)");
  std::vector<std::string> out;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), pattern); it != std::sregex_iterator(); ++it) {
    out.push_back(it->str());
  }
  return out;
}

double ks_uniform(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = std::clamp(sample[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace riskev::testing
