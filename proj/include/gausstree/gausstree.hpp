#pragma once

#include "gausstree/error.hpp"
#include "gausstree/random.hpp"
#include "gausstree/linalg.hpp"
#include "gausstree/distribution.hpp"
#include "gausstree/tree.hpp"
#include "gausstree/gaussian_model.hpp"
#include "gausstree/estimators.hpp"
#include "gausstree/structure_learning.hpp"
#include "gausstree/hard_instances.hpp"
#include "gausstree/glasso.hpp"
#include "gausstree/parallel.hpp"
#include "gausstree/io.hpp"
#include "gausstree/experiments.hpp"
