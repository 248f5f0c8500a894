#pragma once

#include "gridframe/adaptive_estimator.hpp"
#include "gridframe/diagnostics.hpp"
#include "gridframe/error.hpp"
#include "gridframe/series.hpp"
#include "gridframe/signal_model.hpp"
#include "gridframe/subspace.hpp"
#include "gridframe/transforms.hpp"
