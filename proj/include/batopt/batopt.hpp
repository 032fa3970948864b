#pragma once

#include "batopt/bat.hpp"
#include "batopt/core.hpp"
#include "batopt/estimate.hpp"
#include "batopt/glm.hpp"
#include "batopt/harmony.hpp"
#include "batopt/hawkes.hpp"
#include "batopt/logbinomial.hpp"
#include "batopt/markov_renewal.hpp"
#include "batopt/pso.hpp"
#include "batopt/registry.hpp"
#include "batopt/rng.hpp"

#include "batopt/bench/config.hpp"
#include "batopt/bench/csv.hpp"
#include "batopt/bench/experiment.hpp"
#include "batopt/bench/table.hpp"
