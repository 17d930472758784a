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

#include <cstdint>
#include <string>

#include "msfc/harness.hpp"

namespace msfc {

struct CorrSpec {
  int k = 4;
  int levels = 1;
  int samples = 50;
  std::uint64_t seed = 1;
};

// Whole-tool configuration. Every section and key is optional; missing
// keys keep the defaults below. Unknown keys are rejected.
struct Config {
  FactoryConfig factory;
  MethodParams methods;
  ExperimentSpec experiment;
  CorrSpec corr;
};

// JSON text -> Config. Throws ParseError with the offending key path.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
// Full document with every key, suitable as a template.
std::string config_to_json(const Config& c);

}  // namespace msfc
