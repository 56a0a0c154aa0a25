#ifndef MOMEST_MOMEST_HPP
#define MOMEST_MOMEST_HPP

#include "momest/errors.hpp"
#include "momest/special.hpp"
#include "momest/rng.hpp"
#include "momest/distributions.hpp"
#include "momest/estimation.hpp"
#include "momest/asymptotics.hpp"
#include "momest/testing.hpp"
#include "momest/montecarlo.hpp"
#include "momest/report_io.hpp"
#include "momest/sample_io.hpp"

#endif  // MOMEST_MOMEST_HPP
