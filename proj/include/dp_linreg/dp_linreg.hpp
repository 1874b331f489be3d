//
// Copyright 2026 The dp_linreg Authors
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

#pragma once

#include "dp_linreg/calibration.hpp"
#include "dp_linreg/dataset.hpp"
#include "dp_linreg/errors.hpp"
#include "dp_linreg/estimators.hpp"
#include "dp_linreg/harness/experiment.hpp"
#include "dp_linreg/harness/io.hpp"
#include "dp_linreg/harness/metrics.hpp"
#include "dp_linreg/harness/parallel.hpp"
#include "dp_linreg/harness/preprocess.hpp"
#include "dp_linreg/harness/synthetic.hpp"
#include "dp_linreg/mechanisms.hpp"
#include "dp_linreg/numerics.hpp"
#include "dp_linreg/random.hpp"
