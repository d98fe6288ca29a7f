// Copyright 2026 The pipeint Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Welfare lost to fairness on the majority/minority instance as the budget
// grows.

#include <cstdio>

#include "pipeint.hpp"

int main() {
  using namespace pipeint;
  std::printf("%6s %10s %10s %10s %8s %8s\n", "B", "welfare", "fair-wel", "fair-min", "ratio",
              "ceiling");
  for (double B : {0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
    const Instance in = gen_example7(3, 0.01, B);
    const auto b = price_of_fairness_bracket(in, 0.25);
    const auto& c = b.certificate;
    std::printf("%6.2f %10.4f %10.4f %10.4f %8.4f %8.4f\n", B, c.welfare_opt_estimate,
                c.fair_welfare_proxy, c.fair_maximin_value, b.lower, b.upper);
  }
  return 0;
}
