#ifndef OPTODIMER_OPTODIMER_HPP
#define OPTODIMER_OPTODIMER_HPP

#include "optodimer/errors.hpp"
#include "optodimer/params.hpp"
#include "optodimer/fock.hpp"
#include "optodimer/ode.hpp"
#include "optodimer/observables.hpp"
#include "optodimer/lindblad.hpp"
#include "optodimer/nonhermitian.hpp"
#include "optodimer/gaussian.hpp"
#include "optodimer/scenario.hpp"
#include "optodimer/io.hpp"
#include "optodimer/runner.hpp"

#endif
