#pragma once

#include "orsim/cbr.hpp"
#include "orsim/criticality.hpp"
#include "orsim/domain.hpp"
#include "orsim/fatigue.hpp"
#include "orsim/infection.hpp"
#include "orsim/persistence.hpp"
#include "orsim/rng.hpp"
#include "orsim/sim.hpp"
