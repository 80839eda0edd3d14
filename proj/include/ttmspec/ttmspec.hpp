// Copyright 2026 The ttmspec Authors
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

#include "ttmspec/core.hpp"
#include "ttmspec/hierarchy.hpp"
#include "ttmspec/liouville.hpp"
#include "ttmspec/map_io.hpp"
#include "ttmspec/multiqubit.hpp"
#include "ttmspec/noise.hpp"
#include "ttmspec/nonmarkov.hpp"
#include "ttmspec/pipeline.hpp"
#include "ttmspec/propagator.hpp"
#include "ttmspec/qpt.hpp"
#include "ttmspec/report.hpp"
#include "ttmspec/scenarios.hpp"
#include "ttmspec/series.hpp"
#include "ttmspec/spectroscopy.hpp"
#include "ttmspec/ttm.hpp"
