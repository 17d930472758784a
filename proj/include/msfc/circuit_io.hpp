/* Copyright 2026 The msfc Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#pragma once

#include <iosfwd>
#include <string>

#include "msfc/protocol.hpp"

namespace msfc {

// Line-oriented text. Header lines declare the registry, modules and wiring;
// then one gate per line: `KIND q0 q1 ... # round=R module=M [perm=1]`.
void write_circuit(std::ostream& os, const Circuit& c);
Circuit read_circuit(std::istream& is);

void save_circuit(const std::string& path, const Circuit& c);
Circuit load_circuit(const std::string& path);

}  // namespace msfc
