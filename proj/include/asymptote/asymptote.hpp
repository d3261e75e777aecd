#pragma once

// Umbrella header.

#include "asymptote/errors.hpp"
#include "asymptote/expansion.hpp"
#include "asymptote/expansion_io.hpp"
#include "asymptote/gen.hpp"
#include "asymptote/json_writer.hpp"
#include "asymptote/log_calculus.hpp"
#include "asymptote/metric.hpp"
#include "asymptote/monodromy.hpp"
#include "asymptote/rational.hpp"
#include "asymptote/reports.hpp"
#include "asymptote/scenario.hpp"
#include "asymptote/selftest.hpp"
#include "asymptote/sweep.hpp"
#include "asymptote/torsion.hpp"
