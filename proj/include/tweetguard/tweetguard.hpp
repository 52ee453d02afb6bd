#pragma once

#include "tweetguard/blacklist.hpp"
#include "tweetguard/corpus.hpp"
#include "tweetguard/error.hpp"
#include "tweetguard/evaluation.hpp"
#include "tweetguard/features.hpp"
#include "tweetguard/http_fetcher.hpp"
#include "tweetguard/ml/dataset.hpp"
#include "tweetguard/ml/decision_tree.hpp"
#include "tweetguard/ml/importance.hpp"
#include "tweetguard/ml/model.hpp"
#include "tweetguard/ml/naive_bayes.hpp"
#include "tweetguard/ml/random_forest.hpp"
#include "tweetguard/pipeline.hpp"
#include "tweetguard/redirect.hpp"
#include "tweetguard/rng.hpp"
#include "tweetguard/service.hpp"
#include "tweetguard/social.hpp"
#include "tweetguard/synthetic.hpp"
#include "tweetguard/time.hpp"
#include "tweetguard/url.hpp"
#include "tweetguard/verdict.hpp"
#include "tweetguard/whois.hpp"
