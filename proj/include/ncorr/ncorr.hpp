#pragma once

#include "ncorr/corrector.hpp"
#include "ncorr/csv.hpp"
#include "ncorr/duffing.hpp"
#include "ncorr/eigen_analysis.hpp"
#include "ncorr/errors.hpp"
#include "ncorr/experiment.hpp"
#include "ncorr/integrator.hpp"
#include "ncorr/metrics.hpp"
#include "ncorr/rng.hpp"
#include "ncorr/trajectory.hpp"
#include "ncorr/vessel.hpp"
#include "ncorr/wave.hpp"
