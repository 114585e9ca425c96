//
// Copyright 2026 The dsigma Authors
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
//

#ifndef DSIGMA_DSIGMA_HPP_
#define DSIGMA_DSIGMA_HPP_

#include "dsigma/audit.hpp"
#include "dsigma/dataset.hpp"
#include "dsigma/errors.hpp"
#include "dsigma/eval.hpp"
#include "dsigma/groups.hpp"
#include "dsigma/ldp.hpp"
#include "dsigma/mallows.hpp"
#include "dsigma/mechanism.hpp"
#include "dsigma/permutation.hpp"
#include "dsigma/preservation.hpp"
#include "dsigma/seeding.hpp"

#endif  // DSIGMA_DSIGMA_HPP_
