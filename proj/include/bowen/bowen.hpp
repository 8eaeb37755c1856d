#pragma once

#include "bowen/automaton.hpp"
#include "bowen/error.hpp"
#include "bowen/hitting.hpp"
#include "bowen/io.hpp"
#include "bowen/measure.hpp"
#include "bowen/oracle.hpp"
#include "bowen/parallel.hpp"
#include "bowen/rng.hpp"
#include "bowen/stats.hpp"
#include "bowen/survival.hpp"
#include "bowen/symbolic.hpp"
#include "bowen/systems.hpp"
#include "bowen/tower.hpp"
