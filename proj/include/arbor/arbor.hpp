#pragma once

#include "arbor/common.hpp"
#include "arbor/enumerate.hpp"
#include "arbor/experiment.hpp"
#include "arbor/io.hpp"
#include "arbor/moments.hpp"
#include "arbor/offspring.hpp"
#include "arbor/rng.hpp"
#include "arbor/sampler.hpp"
#include "arbor/stats.hpp"
#include "arbor/transform.hpp"
#include "arbor/tree.hpp"
#include "arbor/verify.hpp"
#include "arbor/walk.hpp"
