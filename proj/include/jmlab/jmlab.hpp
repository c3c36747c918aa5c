// Copyright 2026 The jmlab Authors
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

#include "jmlab/gallery.hpp"
#include "jmlab/metrics.hpp"
#include "jmlab/operator.hpp"
#include "jmlab/parallel.hpp"
#include "jmlab/povm.hpp"
#include "jmlab/process.hpp"
#include "jmlab/random.hpp"
#include "jmlab/relations.hpp"
#include "jmlab/search.hpp"
#include "jmlab/sweep.hpp"
#include "jmlab/tolerances.hpp"
