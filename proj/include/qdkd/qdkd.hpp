#pragma once

#include "qdkd/quantum_core.hpp"
#include "qdkd/attacks.hpp"
#include "qdkd/protocol.hpp"
#include "qdkd/analysis.hpp"
#include "qdkd/report.hpp"
