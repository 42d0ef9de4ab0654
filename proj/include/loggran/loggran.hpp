#pragma once

#include "loggran/checkpoint.hpp"
#include "loggran/control_chart.hpp"
#include "loggran/dataset.hpp"
#include "loggran/egnn.hpp"
#include "loggran/eval.hpp"
#include "loggran/experiment.hpp"
#include "loggran/fbem.hpp"
#include "loggran/features.hpp"
#include "loggran/granularity.hpp"
#include "loggran/ingest.hpp"
#include "loggran/normalizer.hpp"
#include "loggran/trapezoid.hpp"
#include "loggran/types.hpp"
