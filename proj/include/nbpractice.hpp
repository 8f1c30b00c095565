#pragma once

#include "nbpractice/bridge.hpp"
#include "nbpractice/checks.hpp"
#include "nbpractice/config.hpp"
#include "nbpractice/error.hpp"
#include "nbpractice/extract.hpp"
#include "nbpractice/ingest.hpp"
#include "nbpractice/lint.hpp"
#include "nbpractice/markdown.hpp"
#include "nbpractice/notebook.hpp"
#include "nbpractice/parallel.hpp"
#include "nbpractice/pylex.hpp"
#include "nbpractice/registry.hpp"
#include "nbpractice/report.hpp"
#include "nbpractice/scan.hpp"
#include "nbpractice/stats.hpp"
#include "nbpractice/text.hpp"
#include "nbpractice/toml.hpp"
