// Copyright 2026 The hamrec Authors
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

// Everything in one include.
#include "hamrec/common.hpp"
#include "hamrec/pauli.hpp"
#include "hamrec/hamiltonian.hpp"
#include "hamrec/thermal.hpp"
#include "hamrec/circuit.hpp"
#include "hamrec/sensing.hpp"
#include "hamrec/recovery.hpp"
#include "hamrec/pipeline.hpp"
#include "hamrec/experiment.hpp"
#include "hamrec/selftest.hpp"
