#ifndef CTFLOW_METRICS_HPP
#define CTFLOW_METRICS_HPP

#include <functional>
#include <map>
#include <string>

namespace ctflow {

// Per-epoch metrics callback used by the task trainers; may be empty.
using MetricsSink = std::function<void(int epoch, const std::map<std::string, double>&)>;

}  // namespace ctflow

#endif
