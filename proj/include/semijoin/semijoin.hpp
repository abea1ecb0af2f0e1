#pragma once

#include "semijoin/atomic_type.hpp"
#include "semijoin/condition.hpp"
#include "semijoin/corpus.hpp"
#include "semijoin/database.hpp"
#include "semijoin/error.hpp"
#include "semijoin/game.hpp"
#include "semijoin/gf.hpp"
#include "semijoin/gf_eval.hpp"
#include "semijoin/gf_parser.hpp"
#include "semijoin/random.hpp"
#include "semijoin/refine.hpp"
#include "semijoin/report.hpp"
#include "semijoin/sa.hpp"
#include "semijoin/sa_parser.hpp"
#include "semijoin/sat_search.hpp"
#include "semijoin/synth.hpp"
#include "semijoin/translate.hpp"
