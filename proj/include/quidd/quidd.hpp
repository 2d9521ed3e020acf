#pragma once

#include "quidd/error.hpp"
#include "quidd/manager.hpp"
#include "quidd/algebra.hpp"
#include "quidd/gates.hpp"
#include "quidd/cnf.hpp"
#include "quidd/oracle.hpp"
#include "quidd/grover.hpp"
#include "quidd/dense.hpp"
#include "quidd/classical.hpp"
#include "quidd/bench.hpp"
