// Copyright (c) 2026, The PastNet Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pastnet::cli {

/// Runs one subcommand. `args` excludes the program name.
/// Returns 0 on success or help, 2 on a usage error, 1 on a runtime failure.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pastnet::cli
