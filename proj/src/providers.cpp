#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "modelspace/error.hpp"
#include "modelspace/llm.hpp"

namespace modelspace {

namespace {

using nlohmann::json;

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kProviderError, "endpoint must start with http:// or https://: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttpProvider : public Provider {
 public:
  explicit HttpProvider(ProviderConfig cfg)
      : cfg_(std::move(cfg)),
        endpoint_(split_endpoint(cfg_.endpoint)),
        slots_(static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, cfg_.max_in_flight))) {}

  std::string name() const override { return "http:" + cfg_.model; }

  LlmResponse complete(const std::string& prompt) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};

    const json request = {
        {"model", cfg_.model},
        {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
        {"temperature", cfg_.temperature},
    };
    const std::string body = request.dump();
    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key != nullptr && *key != '\0') {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    const auto timeout = std::chrono::duration<double>(cfg_.timeout_seconds);
    int status = 0;
    std::string last_body;
    bool timed_out = false;
    const int attempts = 1 + std::max(0, cfg_.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        std::this_thread::sleep_for(
            std::chrono::duration<double>(cfg_.backoff_seconds * std::ldexp(1.0, attempt - 1)));
      }
      httplib::Client client(endpoint_.origin);
      client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
      auto result = client.Post(endpoint_.path, headers, body, "application/json");
      if (!result) {
        const auto err = result.error();
        timed_out = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read;
        status = 0;
        last_body = httplib::to_string(err);
        continue;
      }
      status = result->status;
      last_body = result->body;
      timed_out = false;
      if (status == 429 || status >= 500) continue;
      if (status != 200) throw ProviderError(status, last_body);
      return decode(last_body, attempt + 1);
    }
    if (timed_out) {
      throw Error(ErrorCode::kTimeout, "no answer from " + cfg_.endpoint + " after " +
                                           std::to_string(attempts) + " attempts");
    }
    throw ProviderError(status, last_body);
  }

 private:
  LlmResponse decode(const std::string& body, int attempts) const {
    LlmResponse out;
    try {
      const json reply = json::parse(body);
      out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (reply.contains("usage")) {
        const auto& usage = reply["usage"];
        out.prompt_tokens = usage.value("prompt_tokens", std::size_t{0});
        out.completion_tokens = usage.value("completion_tokens", std::size_t{0});
      }
      out.model = reply.value("model", cfg_.model);
    } catch (const json::exception& e) {
      throw ProviderError(200, std::string("malformed completion: ") + e.what());
    }
    out.provider = name();
    out.attempts = attempts;
    return out;
  }

  ProviderConfig cfg_;
  Endpoint endpoint_;
  std::counting_semaphore<> slots_;
};

class FixtureProvider : public Provider {
 public:
  explicit FixtureProvider(std::string dir) : dir_(std::move(dir)) {}

  std::string name() const override { return "mock-dir"; }

  LlmResponse complete(const std::string& prompt) override {
    const std::string key = fixture_key(prompt);
    std::ifstream in(dir_ + "/" + key + ".txt", std::ios::binary);
    if (!in) throw ProviderError(404, "no fixture " + key + ".txt in " + dir_);
    std::ostringstream text;
    text << in.rdbuf();
    LlmResponse out;
    out.text = text.str();
    out.prompt_tokens = estimate_tokens(prompt);
    out.completion_tokens = estimate_tokens(out.text);
    out.provider = name();
    out.model = "fixture";
    return out;
  }

 private:
  std::string dir_;
};

// Reads the options back out of a post-processor prompt.
std::vector<EditSet> prompt_options(const std::string& prompt) {
  std::vector<EditSet> out;
  const std::string marker = "'Option ";
  for (auto pos = prompt.find(marker); pos != std::string::npos; pos = prompt.find(marker, pos)) {
    const auto colon = prompt.find(": ", pos);
    const auto end = prompt.find('\'', pos + 1);
    if (colon == std::string::npos || end == std::string::npos || colon > end) break;
    const std::string body = prompt.substr(colon + 2, end - colon - 2);
    pos = end + 1;
    std::vector<ModelEdit> edits;
    bool negated = false;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (body.compare(i, 5, "(not ") == 0) {
        negated = true;
        i += 4;
        continue;
      }
      if (body[i] != '(') continue;
      const auto close = body.find(')', i);
      std::istringstream words(body.substr(i + 1, close - i - 1));
      GroundAtom atom;
      words >> atom.predicate;
      for (std::string w; words >> w;) atom.args.push_back(w);
      if (atom.predicate != "no") edits.push_back({negated ? EditKind::kRemove : EditKind::kAdd, atom});
      negated = false;
      i = close;
    }
    out.emplace_back(std::move(edits));
  }
  return out;
}

class OracleProvider : public Provider {
 public:
  explicit OracleProvider(OracleTruth truth) : truth_(std::move(truth)) {}

  std::string name() const override { return "mock-oracle"; }

  LlmResponse complete(const std::string& prompt) override {
    LlmResponse out;
    out.text = answer(prompt);
    out.prompt_tokens = estimate_tokens(prompt);
    out.completion_tokens = estimate_tokens(out.text);
    out.provider = name();
    out.model = "oracle";
    return out;
  }

 private:
  std::string answer(const std::string& prompt) const {
    std::vector<std::string> adds;
    std::vector<std::string> removes;
    for (const auto& e : truth_.repair.edits()) {
      (e.kind == EditKind::kAdd ? adds : removes).push_back(e.atom.str());
    }
    auto join = [](const std::vector<std::string>& v, const char* sep) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
      return s;
    };
    if (prompt.find("Only provide the number of the option selected") != std::string::npos) {
      const auto options = prompt_options(prompt);
      for (std::size_t i = 0; i < options.size(); ++i) {
        if (truth_.preferred && truth_.preferred(options[i])) return std::to_string(i + 1);
      }
      return "1";
    }
    if (prompt.find("a list of twenty predicates") != std::string::npos) {
      return "[" + join(adds, ",\n") + "]";
    }
    if (prompt.find("predicates to be removed from the initial states") != std::string::npos) {
      return "1) Predicates to be added to the initial states:\n" + join(adds, "\n") +
             "\n\n2) Predicates to be removed from the initial states:\n" + join(removes, "\n");
    }
    return join(adds, "\n");
  }

  OracleTruth truth_;
};

}  // namespace

LlmResponse complete(Provider& provider, const ProviderConfig& cfg, const std::string& prompt) {
  const auto fit = check_context_fit(cfg, prompt);
  if (!fit.fits) {
    throw Error(ErrorCode::kContextOverflow,
                "prompt needs about " + std::to_string(fit.estimate) + " tokens plus " +
                    std::to_string(cfg.reply_reserve) + " for the reply; the limit is " +
                    std::to_string(cfg.context_limit));
  }
  return provider.complete(prompt);
}

std::unique_ptr<Provider> make_http_provider(const ProviderConfig& cfg) {
  return std::make_unique<HttpProvider>(cfg);
}

std::string fixture_key(std::string_view prompt) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : prompt) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::unique_ptr<Provider> make_fixture_provider(const std::string& dir) {
  return std::make_unique<FixtureProvider>(dir);
}

std::unique_ptr<Provider> make_oracle_provider(OracleTruth truth) {
  return std::make_unique<OracleProvider>(std::move(truth));
}

}  // namespace modelspace
