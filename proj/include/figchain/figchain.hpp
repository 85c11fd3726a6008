// Copyright 2026 The figchain Authors.
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

#pragma once

#include "figchain/assessment.hpp"
#include "figchain/audit.hpp"
#include "figchain/commit.hpp"
#include "figchain/diff.hpp"
#include "figchain/error.hpp"
#include "figchain/fidelity.hpp"
#include "figchain/figure_map.hpp"
#include "figchain/geometry.hpp"
#include "figchain/glmm/dataset.hpp"
#include "figchain/glmm/fit.hpp"
#include "figchain/glmm/laplace.hpp"
#include "figchain/glmm/nelder_mead.hpp"
#include "figchain/glmm/simulate.hpp"
#include "figchain/json_io.hpp"
#include "figchain/lint.hpp"
#include "figchain/role.hpp"
#include "figchain/svg_model.hpp"
#include "figchain/xml.hpp"
