#pragma once

// Umbrella header for the deviant-learning library.

#include "dla/badc.hpp"
#include "dla/config.hpp"
#include "dla/dataset.hpp"
#include "dla/engine.hpp"
#include "dla/htm.hpp"
#include "dla/memory.hpp"
#include "dla/mismatch.hpp"
#include "dla/overlap.hpp"
#include "dla/rng.hpp"
#include "dla/run.hpp"
