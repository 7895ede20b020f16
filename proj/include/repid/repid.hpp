#ifndef REPID_REPID_HPP
#define REPID_REPID_HPP

#include "repid/common.hpp"
#include "repid/dataset.hpp"
#include "repid/dgp.hpp"
#include "repid/experiments.hpp"
#include "repid/external.hpp"
#include "repid/grid.hpp"
#include "repid/ice.hpp"
#include "repid/indices.hpp"
#include "repid/io.hpp"
#include "repid/predictor.hpp"
#include "repid/report.hpp"
#include "repid/rng.hpp"
#include "repid/stats.hpp"
#include "repid/svg.hpp"
#include "repid/tree.hpp"
#include "repid/truth_fns.hpp"

#endif  // REPID_REPID_HPP
