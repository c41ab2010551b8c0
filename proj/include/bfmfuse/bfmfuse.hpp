#pragma once

#include "bfmfuse/bench.hpp"
#include "bfmfuse/choquet.hpp"
#include "bfmfuse/dataset.hpp"
#include "bfmfuse/errors.hpp"
#include "bfmfuse/io.hpp"
#include "bfmfuse/measure.hpp"
#include "bfmfuse/metrics.hpp"
#include "bfmfuse/objective.hpp"
#include "bfmfuse/optimizer.hpp"
#include "bfmfuse/random.hpp"
#include "bfmfuse/synthetic.hpp"
