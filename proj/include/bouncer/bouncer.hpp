#pragma once

#include "bouncer/analysis.hpp"
#include "bouncer/config.hpp"
#include "bouncer/dataset.hpp"
#include "bouncer/eigensolver.hpp"
#include "bouncer/error.hpp"
#include "bouncer/output.hpp"
#include "bouncer/pipeline.hpp"
#include "bouncer/potential.hpp"
#include "bouncer/transmission.hpp"
#include "bouncer/tridiagonal.hpp"
