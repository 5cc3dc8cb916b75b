#pragma once

#include <Eigen/Core>

#include <vector>

#include "monoproj/errors.hpp"

namespace monoproj {

// Pool Adjacent Violators: weighted least-squares projection of a sequence
// onto the non-decreasing cone. Each level set of the output carries the
// weighted mean of its inputs. Adjacent blocks are pooled only on strict
// decrease; equal block means are left alone (the projection is the same
// either way).
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> pava(
    const Eigen::Ref<const Eigen::Vector<Scalar, Eigen::Dynamic>>& values,
    const Eigen::Ref<const Eigen::Vector<Scalar, Eigen::Dynamic>>& weights) {
  const Eigen::Index n = values.size();
  if (n == 0) throw InputError("pava: empty input");
  if (weights.size() != n) throw InputError("pava: weight count mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(weights[i] > Scalar(0))) throw InputError("pava: weights must be positive");

  struct Block {
    Scalar mean;
    Scalar weight;
    Eigen::Index count;
  };
  std::vector<Block> blocks;
  blocks.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    blocks.push_back({values[i], weights[i], 1});
    while (blocks.size() >= 2) {
      Block& prev = blocks[blocks.size() - 2];
      Block& last = blocks.back();
      if (!(last.mean < prev.mean)) break;
      prev.mean = (prev.mean * prev.weight + last.mean * last.weight) /
                  (prev.weight + last.weight);
      prev.weight += last.weight;
      prev.count += last.count;
      blocks.pop_back();
    }
  }

  Eigen::Vector<Scalar, Eigen::Dynamic> out(n);
  Eigen::Index pos = 0;
  for (const Block& b : blocks) {
    out.segment(pos, b.count).setConstant(b.mean);
    pos += b.count;
  }
  return out;
}

template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> pava(
    const Eigen::Ref<const Eigen::Vector<Scalar, Eigen::Dynamic>>& values) {
  const Eigen::Vector<Scalar, Eigen::Dynamic> w =
      Eigen::Vector<Scalar, Eigen::Dynamic>::Ones(values.size());
  return pava<Scalar>(values, w);
}

inline Eigen::VectorXd pava(const Eigen::Ref<const Eigen::VectorXd>& values,
                            const Eigen::Ref<const Eigen::VectorXd>& weights) {
  return pava<double>(values, weights);
}

inline Eigen::VectorXd pava(const Eigen::Ref<const Eigen::VectorXd>& values) {
  return pava<double>(values);
}

namespace detail {

// In-place unweighted PAVA on a contiguous buffer; scratch avoids per-call
// allocation in the axis-sweep inner loop.
template <typename Scalar>
void pava_unit_inplace(Scalar* x, Eigen::Index n,
                       std::vector<Scalar>& mean_scratch,
                       std::vector<Eigen::Index>& count_scratch) {
  mean_scratch.clear();
  count_scratch.clear();
  for (Eigen::Index i = 0; i < n; ++i) {
    mean_scratch.push_back(x[i]);
    count_scratch.push_back(1);
    while (mean_scratch.size() >= 2) {
      const std::size_t k = mean_scratch.size();
      if (!(mean_scratch[k - 1] < mean_scratch[k - 2])) break;
      const Scalar wa = static_cast<Scalar>(count_scratch[k - 2]);
      const Scalar wb = static_cast<Scalar>(count_scratch[k - 1]);
      mean_scratch[k - 2] = (mean_scratch[k - 2] * wa + mean_scratch[k - 1] * wb) / (wa + wb);
      count_scratch[k - 2] += count_scratch[k - 1];
      mean_scratch.pop_back();
      count_scratch.pop_back();
    }
  }
  Eigen::Index pos = 0;
  for (std::size_t b = 0; b < mean_scratch.size(); ++b) {
    for (Eigen::Index i = 0; i < count_scratch[b]; ++i) x[pos + i] = mean_scratch[b];
    pos += count_scratch[b];
  }
}

}  // namespace detail

}  // namespace monoproj
