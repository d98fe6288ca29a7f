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


#ifndef PIPEINT_HPP_
#define PIPEINT_HPP_

#include "pipeint/bounds.hpp"
#include "pipeint/cost.hpp"
#include "pipeint/dp_maximin.hpp"
#include "pipeint/dp_welfare.hpp"
#include "pipeint/errors.hpp"
#include "pipeint/exante.hpp"
#include "pipeint/generators.hpp"
#include "pipeint/io.hpp"
#include "pipeint/layerlp.hpp"
#include "pipeint/matrix.hpp"
#include "pipeint/model.hpp"
#include "pipeint/netgrid.hpp"
#include "pipeint/oracle.hpp"
#include "pipeint/simplex.hpp"

#endif  // PIPEINT_HPP_
