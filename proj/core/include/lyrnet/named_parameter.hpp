// Copyright 2026 The lyrnet Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "lyrnet/ad/tensor.hpp"

namespace lyrnet {

struct NamedParameter {
  std::string name;
  ad::Tensor tensor;
};

using ParameterList = std::vector<NamedParameter>;

}  // namespace lyrnet
