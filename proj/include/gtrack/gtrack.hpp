#ifndef GTRACK_GTRACK_HPP
#define GTRACK_GTRACK_HPP

#include "gtrack/types.hpp"
#include "gtrack/sequence_io.hpp"
#include "gtrack/gabor_bank.hpp"
#include "gtrack/blob_extract.hpp"
#include "gtrack/blob_merge.hpp"
#include "gtrack/kalman.hpp"
#include "gtrack/tracker.hpp"
#include "gtrack/config.hpp"
#include "gtrack/pipeline.hpp"
#include "gtrack/eval.hpp"
#include "gtrack/protocols.hpp"
#include "gtrack/synth.hpp"

#endif  // GTRACK_GTRACK_HPP
