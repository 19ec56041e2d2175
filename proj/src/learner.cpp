#include "elicit/learner.hpp"

#include <algorithm>
#include <cmath>

namespace elicit {

const char* source_name(EstimateSource source) {
  switch (source) {
    case EstimateSource::Comptron:
      return "comptron";
    case EstimateSource::RobComptron:
      return "rob_comptron";
    case EstimateSource::GroundTruth:
      return "ground-truth";
  }
  return "unknown";
}

McEstimate rademacher_mc(const UtilityTable<double>& sample_utility, const HypothesisClass& cls,
                         int num_draws, std::uint64_t seed) {
  if (num_draws < 1) throw std::invalid_argument("num_draws must be >= 1");
  const Index n = sample_utility.rows();
  if (cls.support_size() != n) throw std::invalid_argument("class does not match sample size");

  // Per-hypothesis realized utilities, one column each.
  Eigen::MatrixXd realized(n, cls.size());
  for (Index j = 0; j < cls.size(); ++j) {
    for (Index i = 0; i < n; ++i) realized(i, j) = sample_utility(i, cls[j](i));
  }

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  Eigen::RowVectorXd eps(n);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int d = 0; d < num_draws; ++d) {
    for (Index i = 0; i < n; ++i) eps(i) = coin(rng) ? 1.0 : -1.0;
    const double v = (eps * realized).cwiseAbs().maxCoeff() / static_cast<double>(n);
    sum += v;
    sum_sq += v * v;
  }
  McEstimate out;
  out.draws = num_draws;
  out.mean = sum / num_draws;
  if (num_draws > 1) {
    const double var = std::max(0.0, (sum_sq - num_draws * out.mean * out.mean) / (num_draws - 1));
    out.std_error = std::sqrt(var / num_draws);
  }
  return out;
}

}  // namespace elicit
