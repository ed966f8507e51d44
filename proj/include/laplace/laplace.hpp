// Umbrella header.
#pragma once

#include "laplace/ast.hpp"
#include "laplace/cli.hpp"
#include "laplace/corpus.hpp"
#include "laplace/eval.hpp"
#include "laplace/oracle.hpp"
#include "laplace/parser.hpp"
#include "laplace/probability.hpp"
#include "laplace/solver.hpp"
