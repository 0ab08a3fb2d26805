#pragma once

#include "rspo/analytic.hpp"
#include "rspo/baseline.hpp"
#include "rspo/combinatorics.hpp"
#include "rspo/estimator.hpp"
#include "rspo/gradient.hpp"
#include "rspo/io.hpp"
#include "rspo/maxk.hpp"
#include "rspo/oracle.hpp"
#include "rspo/passk.hpp"
#include "rspo/random.hpp"
#include "rspo/scalar.hpp"
#include "rspo/tasks.hpp"
#include "rspo/trainer.hpp"
#include "rspo/types.hpp"
#include "rspo/verify.hpp"
