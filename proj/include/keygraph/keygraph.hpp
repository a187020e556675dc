#pragma once

#include "keygraph/analysis.hpp"
#include "keygraph/errors.hpp"
#include "keygraph/exact_oracle.hpp"
#include "keygraph/experiment.hpp"
#include "keygraph/graph.hpp"
#include "keygraph/model_core.hpp"
#include "keygraph/report.hpp"
#include "keygraph/rng.hpp"
#include "keygraph/samplers.hpp"
#include "keygraph/verify_suite.hpp"
#include "keygraph/version.hpp"
