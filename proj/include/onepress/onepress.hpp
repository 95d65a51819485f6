#pragma once

#include "onepress/config_io.hpp"
#include "onepress/detector.hpp"
#include "onepress/error.hpp"
#include "onepress/event_io.hpp"
#include "onepress/event_layer.hpp"
#include "onepress/gateway.hpp"
#include "onepress/scenario.hpp"
#include "onepress/signal_model.hpp"
#include "onepress/trace_io.hpp"
#include "onepress/trial.hpp"
#include "onepress/wytiwyg.hpp"
