// Copyright 2026 The synswap Authors
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

#include "synswap/chsh.hpp"
#include "synswap/errors.hpp"
#include "synswap/laser_sync.hpp"
#include "synswap/pipeline.hpp"
#include "synswap/polarization.hpp"
#include "synswap/random.hpp"
#include "synswap/scenario.hpp"
#include "synswap/swapping.hpp"
#include "synswap/version.hpp"
#include "synswap/wavepacket.hpp"
