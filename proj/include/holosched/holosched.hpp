// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "holosched/channel.hpp"
#include "holosched/common.hpp"
#include "holosched/config.hpp"
#include "holosched/harness.hpp"
#include "holosched/holo_opt.hpp"
#include "holosched/precoder.hpp"
#include "holosched/rng.hpp"
#include "holosched/scheduler.hpp"
#include "holosched/surface.hpp"
