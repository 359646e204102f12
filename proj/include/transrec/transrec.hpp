#pragma once

// Umbrella header for the whole engine.

#include "transrec/common.hpp"
#include "transrec/rng.hpp"
#include "transrec/linalg.hpp"
#include "transrec/interactions.hpp"
#include "transrec/dataset.hpp"
#include "transrec/ranking_model.hpp"
#include "transrec/transrec_model.hpp"
#include "transrec/baselines.hpp"
#include "transrec/model_io.hpp"
#include "transrec/eval.hpp"
#include "transrec/training.hpp"
#include "transrec/retrieval.hpp"
#include "transrec/features.hpp"
#include "transrec/item2item.hpp"
#include "transrec/grid.hpp"
