#ifndef NETLEARN_NETLEARN_HPP
#define NETLEARN_NETLEARN_HPP

#include "netlearn/types.hpp"
#include "netlearn/rng.hpp"
#include "netlearn/local_learning.hpp"
#include "netlearn/network.hpp"
#include "netlearn/graph_inference.hpp"
#include "netlearn/model_update.hpp"
#include "netlearn/task_gen.hpp"
#include "netlearn/metrics.hpp"
#include "netlearn/experiment.hpp"

#endif  // NETLEARN_NETLEARN_HPP
