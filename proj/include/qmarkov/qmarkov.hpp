// Copyright 2026 The qmarkov Authors
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

#include "qmarkov/asymptotics.hpp"
#include "qmarkov/attractor.hpp"
#include "qmarkov/channel.hpp"
#include "qmarkov/errors.hpp"
#include "qmarkov/invariants.hpp"
#include "qmarkov/json_io.hpp"
#include "qmarkov/linalg.hpp"
#include "qmarkov/operator_space.hpp"
#include "qmarkov/spectral.hpp"
#include "qmarkov/standard_channels.hpp"
#include "qmarkov/tolerances.hpp"
