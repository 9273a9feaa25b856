#pragma once

// Umbrella header.

#include "pauc/bias.hpp"
#include "pauc/config.hpp"
#include "pauc/datagen.hpp"
#include "pauc/dataset.hpp"
#include "pauc/errors.hpp"
#include "pauc/experiments.hpp"
#include "pauc/io.hpp"
#include "pauc/pinning.hpp"
#include "pauc/rank.hpp"
#include "pauc/remote.hpp"
#include "pauc/rng.hpp"
#include "pauc/simscore.hpp"
