// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#include "lyrnet/corpus/split.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "lyrnet/ad/rng.hpp"
#include "lyrnet/error.hpp"

namespace lyrnet::corpus {

std::vector<NamedSplit> split_corpus(const std::vector<LyricsDocument>& documents,
                                     const std::vector<SplitSpec>& specs, std::uint64_t seed) {
  if (specs.empty()) throw ContractError("split: no splits requested");
  double total = 0.0;
  for (const auto& s : specs) {
    if (!(s.ratio > 0.0)) throw ContractError("split: ratio for '" + s.name + "' must be positive");
    total += s.ratio;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ContractError("split: ratios sum to " + std::to_string(total) + ", expected 1");
  }

  std::array<std::vector<std::size_t>, 4> by_quadrant;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const auto& label = documents[i].label;
    if (!label) throw DataError("split: document '" + documents[i].id + "' has no label to stratify by");
    by_quadrant[static_cast<std::size_t>(label->quadrant())].push_back(i);
  }

  const ad::Rng root(seed, 0x73706c6974);  // "split"
  std::vector<std::vector<std::size_t>> assigned(specs.size());
  for (std::size_t q = 0; q < 4; ++q) {
    auto& members = by_quadrant[q];
    if (members.empty()) continue;
    ad::Rng rng = root.split(q);
    rng.shuffle(members);

    const auto n = static_cast<double>(members.size());
    std::vector<std::size_t> counts(specs.size());
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t used = 0;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      const double exact = specs[s].ratio * n;
      counts[s] = static_cast<std::size_t>(std::floor(exact));
      used += counts[s];
      remainders.emplace_back(exact - static_cast<double>(counts[s]), s);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; used < members.size(); ++k, ++used) ++counts[remainders[k].second];

    std::size_t offset = 0;
    for (std::size_t s = 0; s < specs.size(); ++s) {
      if (counts[s] == 0) {
        throw DataError("split: infeasible stratification: quadrant Q" + std::to_string(q + 1) +
                        " has " + std::to_string(members.size()) +
                        " documents, too few for split '" + specs[s].name + "'");
      }
      for (std::size_t k = 0; k < counts[s]; ++k) assigned[s].push_back(members[offset + k]);
      offset += counts[s];
    }
  }

  std::vector<NamedSplit> out;
  for (std::size_t s = 0; s < specs.size(); ++s) {
    std::sort(assigned[s].begin(), assigned[s].end());
    NamedSplit split{specs[s].name, {}};
    split.documents.reserve(assigned[s].size());
    for (auto i : assigned[s]) split.documents.push_back(documents[i]);
    out.push_back(std::move(split));
  }
  return out;
}

}  // namespace lyrnet::corpus
