/* Copyright 2026 The herosim Authors */
/* SPDX-License-Identifier: Apache-2.0 */

#pragma once

#include "herosim/analysis.hpp"
#include "herosim/benchmarks.hpp"
#include "herosim/cluster.hpp"
#include "herosim/config.hpp"
#include "herosim/engine.hpp"
#include "herosim/error.hpp"
#include "herosim/experiment.hpp"
#include "herosim/matrix.hpp"
#include "herosim/memory.hpp"
#include "herosim/offload.hpp"
#include "herosim/rab.hpp"
#include "herosim/results.hpp"
#include "herosim/soc.hpp"
#include "herosim/trace.hpp"
#include "herosim/vmm.hpp"
