//
// Copyright 2026 The puffercal Authors
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

#ifndef PUFFERCAL_PUFFERCAL_HPP_
#define PUFFERCAL_PUFFERCAL_HPP_

#include "puffercal/calibrate.hpp"
#include "puffercal/dist.hpp"
#include "puffercal/error.hpp"
#include "puffercal/ingest.hpp"
#include "puffercal/numeric.hpp"
#include "puffercal/parallel.hpp"
#include "puffercal/solve.hpp"
#include "puffercal/transport.hpp"
#include "puffercal/verify.hpp"

#endif  // PUFFERCAL_PUFFERCAL_HPP_
