// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace pastnet {

/// Invalid configuration: divisibility, ranges, inconsistent sizes.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two arrays that must agree in shape do not.
class ShapeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation or training run produced non-finite or unphysical state.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace pastnet
