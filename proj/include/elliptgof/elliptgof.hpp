#pragma once

#include "elliptgof/calibration.hpp"
#include "elliptgof/datagen.hpp"
#include "elliptgof/error.hpp"
#include "elliptgof/ingest.hpp"
#include "elliptgof/linalg.hpp"
#include "elliptgof/parallel.hpp"
#include "elliptgof/rng.hpp"
#include "elliptgof/robust.hpp"
#include "elliptgof/simulation.hpp"
#include "elliptgof/statistics.hpp"
