// Copyright 2026 The IntraMix Lab Authors.
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


#ifndef INTRAMIX_INTRAMIX_HPP_
#define INTRAMIX_INTRAMIX_HPP_

#include "intramix/augment.hpp"
#include "intramix/container.hpp"
#include "intramix/dataset.hpp"
#include "intramix/experiment.hpp"
#include "intramix/gcn.hpp"
#include "intramix/graph.hpp"
#include "intramix/metrics.hpp"
#include "intramix/pseudo_label.hpp"
#include "intramix/random.hpp"
#include "intramix/report.hpp"
#include "intramix/theory.hpp"

#endif  // INTRAMIX_INTRAMIX_HPP_
