#pragma once

#include "verilocal/corners.hpp"
#include "verilocal/error.hpp"
#include "verilocal/graph.hpp"
#include "verilocal/io.hpp"
#include "verilocal/lp.hpp"
#include "verilocal/oracle.hpp"
#include "verilocal/outlier_model.hpp"
#include "verilocal/parallel.hpp"
#include "verilocal/probability.hpp"
#include "verilocal/rational.hpp"
