#pragma once

// Umbrella header for the ppibench library.

#include "ppibench/alignment.hpp"
#include "ppibench/amino.hpp"
#include "ppibench/checkpoint.hpp"
#include "ppibench/cluster.hpp"
#include "ppibench/curation.hpp"
#include "ppibench/embedder.hpp"
#include "ppibench/entries.hpp"
#include "ppibench/heads.hpp"
#include "ppibench/log.hpp"
#include "ppibench/metrics.hpp"
#include "ppibench/optim.hpp"
#include "ppibench/pdb.hpp"
#include "ppibench/split.hpp"
#include "ppibench/tensor.hpp"
#include "ppibench/train.hpp"
