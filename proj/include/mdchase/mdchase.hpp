#pragma once

#include "mdchase/analysis.hpp"
#include "mdchase/answer.hpp"
#include "mdchase/chase.hpp"
#include "mdchase/error.hpp"
#include "mdchase/instance.hpp"
#include "mdchase/io.hpp"
#include "mdchase/md.hpp"
#include "mdchase/query.hpp"
#include "mdchase/report.hpp"
#include "mdchase/schema.hpp"
#include "mdchase/similarity.hpp"
#include "mdchase/value.hpp"
