#pragma once

// Umbrella header. The HTTP client lives in moralnet/http_client.hpp and is
// not included here.
#include "moralnet/analysis.hpp"
#include "moralnet/csv.hpp"
#include "moralnet/data_io.hpp"
#include "moralnet/elicitation.hpp"
#include "moralnet/error.hpp"
#include "moralnet/evaluation.hpp"
#include "moralnet/graph.hpp"
#include "moralnet/graph_stats.hpp"
#include "moralnet/manifest.hpp"
#include "moralnet/propagation.hpp"
#include "moralnet/report.hpp"
#include "moralnet/sparse.hpp"
#include "moralnet/statistics.hpp"
#include "moralnet/tokens.hpp"
