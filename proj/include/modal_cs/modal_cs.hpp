#pragma once

#include "modal_cs/baselines.hpp"
#include "modal_cs/bounds.hpp"
#include "modal_cs/error.hpp"
#include "modal_cs/linalg.hpp"
#include "modal_cs/mdof.hpp"
#include "modal_cs/random.hpp"
#include "modal_cs/sampling.hpp"
#include "modal_cs/svd_estimator.hpp"
