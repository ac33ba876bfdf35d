#pragma once

#include "geoknn/data_io.hpp"
#include "geoknn/errors.hpp"
#include "geoknn/estimators.hpp"
#include "geoknn/experiments.hpp"
#include "geoknn/kernel.hpp"
#include "geoknn/manifold.hpp"
#include "geoknn/models.hpp"
#include "geoknn/neighbors.hpp"
#include "geoknn/quadrature.hpp"
#include "geoknn/random.hpp"
#include "geoknn/sample_set.hpp"
