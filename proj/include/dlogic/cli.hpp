// Copyright 2026 The dlogic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>

namespace dlogic {

/// Command-line entry point. Subcommands: eval, train, sweep, tables.
/// Returns 0 on success, 1 on usage errors (bad flags, unknown backend or
/// constraint names, malformed formulas) and 2 on runtime errors (I/O,
/// non-finite losses).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dlogic
