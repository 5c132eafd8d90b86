#pragma once

#include "errors.hpp"
#include "ferguson.hpp"
#include "lap.hpp"
#include "markov.hpp"
#include "montecarlo.hpp"
#include "multi_select.hpp"
#include "multiplicative.hpp"
#include "odds.hpp"
#include "policy.hpp"
#include "random.hpp"
#include "stats.hpp"
#include "verify.hpp"
