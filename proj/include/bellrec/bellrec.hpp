#pragma once

#include "bellrec/errors.hpp"
#include "bellrec/qmat.hpp"
#include "bellrec/states.hpp"
#include "bellrec/strategies.hpp"
#include "bellrec/chsh.hpp"
#include "bellrec/golden.hpp"
#include "bellrec/frontier.hpp"
#include "bellrec/shotsim.hpp"
