#pragma once

#include "ggm/bounds.hpp"
#include "ggm/error.hpp"
#include "ggm/estimator.hpp"
#include "ggm/graph.hpp"
#include "ggm/harness.hpp"
#include "ggm/io.hpp"
#include "ggm/lbp.hpp"
#include "ggm/model.hpp"
#include "ggm/sampler.hpp"
