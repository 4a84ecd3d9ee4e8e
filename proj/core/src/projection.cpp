#include "riseer/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "riseer/error.hpp"

namespace riseer {

std::vector<double> snapshot_vector(std::span<const EnterpriseRecord> records,
                                    std::span<const std::uint32_t> active,
                                    const Vocabularies& vocab) {
  const std::size_t cls = vocab.classification.encoded_size();
  const std::size_t prop = vocab.property.encoded_size();
  const std::size_t state = vocab.state.encoded_size();
  const std::size_t credit = vocab.credit_rating.encoded_size();
  std::vector<double> v(cls + prop + state + credit + 2, 0.0);
  if (active.empty()) return v;

  double capital = 0.0;
  for (auto i : active) {
    const auto& r = records[i];
    v[vocab.classification.slot(r.classification_code)] += 1.0;
    v[cls + vocab.property.slot(r.property)] += 1.0;
    v[cls + prop + vocab.state.slot(r.state)] += 1.0;
    v[cls + prop + state + vocab.credit_rating.slot(r.credit_rating)] += 1.0;
    capital += r.registered_capital;
  }
  const double n = static_cast<double>(active.size());
  for (std::size_t k = 0; k < v.size() - 2; ++k) v[k] /= n;
  v[v.size() - 2] = std::log10(1.0 + capital / n);
  v[v.size() - 1] = std::log10(1.0 + capital);
  return v;
}

void attach_projection_features(std::span<MonthlySnapshot> snapshots, const MonthIndex& index,
                                std::span<const EnterpriseRecord> records,
                                const Vocabularies& vocab) {
  for (auto& s : snapshots) {
    s.projection_features = snapshot_vector(records, index.active(s.month), vocab);
  }
}

Affinities compute_affinities(std::span<const std::vector<double>> vectors, double perplexity) {
  const std::size_t n = vectors.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = 0.0;
      for (std::size_t k = 0; k < vectors[i].size(); ++k) {
        const double diff = vectors[i][k] - vectors[j][k];
        d += diff * diff;
      }
      dist[i * n + j] = dist[j * n + i] = d;
    }
  }

  Affinities a;
  a.conditional.assign(n * n, 0.0);
  const double target = std::log(perplexity);
  std::vector<double> row(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Bisection on beta = 1 / (2 sigma^2); distances are shifted by the row
    // minimum so exp() cannot underflow to an all-zero row.
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) min_d = std::min(min_d, dist[i * n + j]);
    }
    double beta = 1.0, lo = 0.0, hi = std::numeric_limits<double>::infinity();
    double entropy = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double sum = 0.0, weighted = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) {
          row[j] = 0.0;
          continue;
        }
        const double shifted = dist[i * n + j] - min_d;
        row[j] = std::exp(-beta * shifted);
        sum += row[j];
        weighted += shifted * row[j];
      }
      entropy = std::log(sum) + beta * weighted / sum;
      for (std::size_t j = 0; j < n; ++j) row[j] /= sum;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-7) break;
      if (diff > 0.0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2.0 : 0.5 * (beta + hi);
      } else {
        hi = beta;
        beta = 0.5 * (beta + lo);
      }
    }
    a.max_entropy_error = std::max(a.max_entropy_error, std::abs(entropy - target));
    std::copy(row.begin(), row.end(), a.conditional.begin() + static_cast<std::ptrdiff_t>(i * n));
  }

  a.joint.assign(n * n, 0.0);
  const double denom = 2.0 * static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      a.joint[i * n + j] = (a.conditional[i * n + j] + a.conditional[j * n + i]) / denom;
    }
  }
  return a;
}

TsneResult tsne_embed(std::span<const std::vector<double>> vectors, const TsneOptions& options) {
  const std::size_t n = vectors.size();
  if (n < 3) throw Error(Errc::invalid_argument, "t-SNE needs at least 3 points");
  if (!(options.perplexity > 0.0) || options.perplexity >= static_cast<double>(n) / 3.0) {
    throw Error(Errc::invalid_argument, "perplexity must be positive and below n / 3");
  }
  for (const auto& v : vectors) {
    if (v.size() != vectors[0].size()) throw Error(Errc::invalid_argument, "ragged vectors");
  }

  const Affinities aff = compute_affinities(vectors, options.perplexity);
  const std::vector<double>& p = aff.joint;

  TsneResult result;
  result.max_entropy_error = aff.max_entropy_error;
  result.learning_rate =
      options.learning_rate > 0.0 ? options.learning_rate : static_cast<double>(n) / 12.0;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> init(0.0, 1e-4);
  std::vector<double> y(2 * n), update(2 * n, 0.0), gains(2 * n, 1.0), grad(2 * n);
  for (auto& v : y) v = init(rng);

  std::vector<double> num(n * n);
  for (std::size_t iter = 0; iter < options.iterations; ++iter) {
    const bool early = iter < options.exaggeration_iterations;
    const double exaggeration = early ? options.exaggeration : 1.0;
    const double momentum = early ? 0.5 : 0.8;

    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num[i * n + i] = 0.0;
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = y[2 * i] - y[2 * j], dy = y[2 * i + 1] - y[2 * j + 1];
        const double q = 1.0 / (1.0 + dx * dx + dy * dy);
        num[i * n + j] = num[j * n + i] = q;
        z += 2.0 * q;
      }
    }

    double kl = 0.0;
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double pij = p[i * n + j];
        const double qij = num[i * n + j] / z;
        const double mult = (exaggeration * pij - qij) * num[i * n + j];
        grad[2 * i] += 4.0 * mult * (y[2 * i] - y[2 * j]);
        grad[2 * i + 1] += 4.0 * mult * (y[2 * i + 1] - y[2 * j + 1]);
        if (pij > 0.0) kl += pij * std::log(pij / std::max(qij, 1e-300));
      }
    }
    // KL of the layout the gradient was taken at.
    result.kl_trace.push_back(kl);

    for (std::size_t k = 0; k < 2 * n; ++k) {
      const bool same_sign = (grad[k] > 0.0) == (update[k] > 0.0);
      gains[k] = same_sign ? std::max(gains[k] * 0.8, 0.01) : gains[k] + 0.2;
      update[k] = momentum * update[k] - result.learning_rate * gains[k] * grad[k];
      y[k] += update[k];
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += y[2 * i];
      my += y[2 * i + 1];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[2 * i] -= mx;
      y[2 * i + 1] -= my;
    }
  }

  result.embedding.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.embedding[i] = {y[2 * i], y[2 * i + 1]};
  result.kl = result.kl_trace.empty() ? 0.0 : result.kl_trace.back();
  return result;
}

std::vector<std::vector<double>> zscore_columns(std::span<const std::vector<double>> vectors) {
  std::vector<std::vector<double>> out(vectors.begin(), vectors.end());
  if (out.empty()) return out;
  const std::size_t d = out[0].size();
  const double n = static_cast<double>(out.size());
  for (std::size_t k = 0; k < d; ++k) {
    double mean = 0.0;
    for (const auto& v : out) mean += v[k];
    mean /= n;
    double var = 0.0;
    for (const auto& v : out) var += (v[k] - mean) * (v[k] - mean);
    const double sd = std::sqrt(var / n);
    for (auto& v : out) v[k] = sd > 1e-12 ? (v[k] - mean) / sd : 0.0;
  }
  return out;
}

Chronology chronology(std::span<const ProjectionPoint> points) {
  Chronology c;
  c.order.resize(points.size());
  std::iota(c.order.begin(), c.order.end(), 0);
  std::stable_sort(c.order.begin(), c.order.end(), [&](std::size_t a, std::size_t b) {
    return points[a].month < points[b].month;
  });
  if (!c.order.empty()) {
    c.first = c.order.front();
    c.last = c.order.back();
  }
  return c;
}

Projection project_snapshots(std::span<const MonthlySnapshot> snapshots, TsneOptions options) {
  std::vector<std::vector<double>> raw;
  for (const auto& s : snapshots) raw.push_back(s.projection_features);
  const double n = static_cast<double>(raw.size());
  if (options.perplexity >= n / 3.0) options.perplexity = std::max(1.0, (n - 1.0) / 3.0);

  Projection out;
  out.tsne = tsne_embed(zscore_columns(raw), options);
  out.settings = options;
  out.settings.learning_rate = out.tsne.learning_rate;
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    out.points.push_back({snapshots[i].month, out.tsne.embedding[i], i});
  }
  // Order indices follow chronology even if the input was not sorted.
  auto chron = chronology(out.points);
  for (std::size_t rank = 0; rank < chron.order.size(); ++rank) {
    out.points[chron.order[rank]].order_index = rank;
  }
  return out;
}

}  // namespace riseer
