#pragma once

#include "honeygen/config.hpp"
#include "honeygen/crawler.hpp"
#include "honeygen/dsv.hpp"
#include "honeygen/error.hpp"
#include "honeygen/honeywords.hpp"
#include "honeygen/llm_gateway.hpp"
#include "honeygen/password_model.hpp"
#include "honeygen/pipeline.hpp"
#include "honeygen/prompt_kit.hpp"
#include "honeygen/robots_txt.hpp"
#include "honeygen/run_store.hpp"
#include "honeygen/text.hpp"
#include "honeygen/token_specs.hpp"
