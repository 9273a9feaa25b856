#pragma once

#include <chrono>
#include <cmath>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "pauc/dataset.hpp"

// Batch client for a remote scoring service speaking the wire contract
// documented in docs/formats.md:
//
//   POST <path>         {"texts": ["...", ...]}
//   200                 {"scores": [0.73, ...]}    same length, same order
//
// Texts are sent in fixed-size batches; transient failures (429, 5xx,
// network errors) are retried with exponential backoff, then surfaced
// as per-item errors so one bad batch never aborts or reorders the
// rest. Results always line up index-for-index with the input.

namespace pauc {

struct RemoteScorerConfig {
  std::string endpoint;    // http://host[:port][/path], path defaults to /score
  std::string credential;  // sent as "Authorization: Bearer ..." if non-empty
  std::size_t batch_size = 100;
  double timeout_seconds = 10.0;
  int max_attempts = 3;
  double initial_backoff_seconds = 0.5;
  double backoff_multiplier = 2.0;
  int max_concurrency = 1;  // batches in flight
};

struct RemoteScore {
  std::optional<double> score;
  std::string error;  // empty on success

  bool ok() const { return score.has_value(); }
};

namespace detail {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline Endpoint parse_endpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw std::invalid_argument("endpoint must start with http:// : " + url);
  }
  const std::size_t slash = url.find('/', scheme.size());
  if (slash == std::string::npos) return {url, "/score"};
  return {url.substr(0, slash), url.substr(slash)};
}

struct BatchOutcome {
  std::vector<RemoteScore> items;
};

inline BatchOutcome score_batch(const Endpoint& endpoint,
                                const RemoteScorerConfig& config,
                                std::span<const std::string> texts) {
  nlohmann::json request;
  request["texts"] = std::vector<std::string>(texts.begin(), texts.end());
  const std::string body = request.dump();

  httplib::Client client(endpoint.base);
  const auto seconds = static_cast<time_t>(config.timeout_seconds);
  const auto micros = static_cast<time_t>(
      (config.timeout_seconds - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  httplib::Headers headers;
  if (!config.credential.empty()) {
    headers.emplace("Authorization", "Bearer " + config.credential);
  }

  const auto fail_all = [&](const std::string& error) {
    BatchOutcome outcome;
    outcome.items.assign(texts.size(), RemoteScore{std::nullopt, error});
    return outcome;
  };

  double backoff = config.initial_backoff_seconds;
  std::string last_error = "no attempts made";
  for (int attempt = 1; attempt <= std::max(config.max_attempts, 1);
       ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
      backoff *= config.backoff_multiplier;
    }
    const httplib::Result result =
        client.Post(endpoint.path, headers, body, "application/json");
    if (!result) {
      last_error = "network error: " + httplib::to_string(result.error());
      continue;  // retryable
    }
    const int status = result->status;
    if (status == 401 || status == 403) {
      return fail_all("auth-error: http status " + std::to_string(status));
    }
    if (status == 429 || status >= 500) {
      last_error = "rate-limit or server error: http status " +
                   std::to_string(status);
      continue;  // retryable
    }
    if (status != 200) {
      return fail_all("malformed-response: http status " +
                      std::to_string(status));
    }

    nlohmann::json response;
    try {
      response = nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::parse_error&) {
      return fail_all("malformed-response: body is not valid json");
    }
    if (!response.is_object() || !response.contains("scores") ||
        !response["scores"].is_array()) {
      return fail_all("malformed-response: missing 'scores' array");
    }
    const auto& scores = response["scores"];
    if (scores.size() != texts.size()) {
      return fail_all("malformed-response: expected " +
                      std::to_string(texts.size()) + " scores, got " +
                      std::to_string(scores.size()));
    }
    BatchOutcome outcome;
    outcome.items.reserve(texts.size());
    for (const auto& value : scores) {
      if (!value.is_number()) {
        outcome.items.push_back(
            {std::nullopt, "malformed-response: score is not a number"});
        continue;
      }
      const double score = value.get<double>();
      if (!(score >= 0.0 && score <= 1.0) || std::isnan(score)) {
        outcome.items.push_back(
            {std::nullopt, "malformed-response: score out of range [0,1]: " +
                               std::to_string(score)});
        continue;
      }
      outcome.items.push_back({score, ""});
    }
    return outcome;
  }
  return fail_all(last_error + " (retries exhausted)");
}

}  // namespace detail

// One result per input text, order-preserving. Batches may run
// concurrently up to config.max_concurrency; results are reassembled by
// batch index so concurrency never affects the output.
inline std::vector<RemoteScore> score_remote(
    std::span<const std::string> texts, const RemoteScorerConfig& config) {
  if (config.batch_size < 1) {
    throw std::invalid_argument("batch_size must be >= 1");
  }
  if (texts.empty()) return {};
  const detail::Endpoint endpoint = detail::parse_endpoint(config.endpoint);

  const std::size_t batches =
      (texts.size() + config.batch_size - 1) / config.batch_size;
  std::vector<detail::BatchOutcome> outcomes(batches);
  const auto run_batch = [&](std::size_t b) {
    const std::size_t begin = b * config.batch_size;
    const std::size_t count =
        std::min(config.batch_size, texts.size() - begin);
    outcomes[b] = detail::score_batch(endpoint, config,
                                      texts.subspan(begin, count));
  };

  const std::size_t inflight =
      std::max<std::size_t>(1, static_cast<std::size_t>(config.max_concurrency));
  for (std::size_t wave = 0; wave < batches; wave += inflight) {
    std::vector<std::future<void>> tasks;
    for (std::size_t b = wave; b < std::min(wave + inflight, batches); ++b) {
      tasks.push_back(std::async(std::launch::async, run_batch, b));
    }
    for (auto& task : tasks) task.get();
  }

  std::vector<RemoteScore> results;
  results.reserve(texts.size());
  for (auto& outcome : outcomes) {
    for (auto& item : outcome.items) results.push_back(std::move(item));
  }
  return results;
}

}  // namespace pauc
