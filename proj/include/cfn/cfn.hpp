#pragma once

#include "cfn/asymptotics.hpp"
#include "cfn/calculus.hpp"
#include "cfn/constant.hpp"
#include "cfn/corpus.hpp"
#include "cfn/errors.hpp"
#include "cfn/expr.hpp"
#include "cfn/grid.hpp"
#include "cfn/interval.hpp"
#include "cfn/numeric.hpp"
#include "cfn/parser.hpp"
#include "cfn/prepare.hpp"
#include "cfn/rational.hpp"
#include "cfn/serialize.hpp"
#include "cfn/series.hpp"
#include "cfn/validate.hpp"
