#pragma once

#include "pgdlab/errors.hpp"
#include "pgdlab/geometry.hpp"
#include "pgdlab/random.hpp"
#include "pgdlab/instances.hpp"
#include "pgdlab/oracles.hpp"
#include "pgdlab/optimizers.hpp"
#include "pgdlab/verifiers.hpp"
#include "pgdlab/harness/config.hpp"
#include "pgdlab/harness/experiment.hpp"
#include "pgdlab/harness/suite.hpp"
