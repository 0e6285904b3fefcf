#pragma once

// Everything except the JSON-dependent driver (esg/pipeline.hpp).

#include "esg/classifier.hpp"
#include "esg/equivalence.hpp"
#include "esg/generator.hpp"
#include "esg/metrics.hpp"
#include "esg/normalizer.hpp"
#include "esg/parser.hpp"
#include "esg/stack_model.hpp"
