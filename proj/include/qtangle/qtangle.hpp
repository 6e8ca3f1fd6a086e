// Copyright 2026 The qtangle Authors
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

#include "qtangle/circuitcount.hpp"
#include "qtangle/concurrence.hpp"
#include "qtangle/errors.hpp"
#include "qtangle/gate_circuit.hpp"
#include "qtangle/interferometer.hpp"
#include "qtangle/linalg.hpp"
#include "qtangle/momentcircuits.hpp"
#include "qtangle/moments.hpp"
#include "qtangle/rng.hpp"
#include "qtangle/spectrum.hpp"
#include "qtangle/state_io.hpp"
#include "qtangle/states.hpp"
#include "qtangle/tangle3.hpp"
