#pragma once

#include "graphon_rds/distortion.hpp"
#include "graphon_rds/errors.hpp"
#include "graphon_rds/experiments.hpp"
#include "graphon_rds/graph.hpp"
#include "graphon_rds/homstats.hpp"
#include "graphon_rds/kernel.hpp"
#include "graphon_rds/kernel_io.hpp"
#include "graphon_rds/motif.hpp"
#include "graphon_rds/parallel.hpp"
#include "graphon_rds/quadrature.hpp"
#include "graphon_rds/rds.hpp"
#include "graphon_rds/rng.hpp"
#include "graphon_rds/version.hpp"
