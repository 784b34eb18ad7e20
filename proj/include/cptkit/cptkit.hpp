// cptkit.hpp - umbrella header.
#pragma once

#include "cptkit/bench.hpp"
#include "cptkit/binseg.hpp"
#include "cptkit/core.hpp"
#include "cptkit/cusum.hpp"
#include "cptkit/distance.hpp"
#include "cptkit/penlik.hpp"
#include "cptkit/wbs.hpp"
#include "cptkit/wbs2_sdll.hpp"
