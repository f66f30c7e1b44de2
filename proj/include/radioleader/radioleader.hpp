// Copyright 2026 The radioleader Authors
// SPDX-License-Identifier: Apache-2.0
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


#pragma once

#include <radioleader/channel.hpp>
#include <radioleader/dense.hpp>
#include <radioleader/experiment.hpp>
#include <radioleader/lowerbound.hpp>
#include <radioleader/partitions.hpp>
#include <radioleader/protocols_core.hpp>
#include <radioleader/runtime.hpp>
#include <radioleader/support.hpp>
#include <radioleader/tradeoff.hpp>
