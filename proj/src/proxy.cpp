// SPDX-License-Identifier: Apache-2.0

#include <utility>

#include "thinkahead/runtime.hpp"

namespace thinkahead::runtime {

Proxy::Proxy(const analysis::UrlMap& seed,
             const std::map<std::string, std::string>& hint_urls,
             std::vector<ir::RewriteRule> rewrite_rules, int threshold)
    : rewrite_rules_(std::move(rewrite_rules)), threshold_(threshold) {
  if (threshold_ < 1) throw RunError("prefetch threshold must be >= 1");
  for (const auto& [url_id, parts] : seed) {
    auto& slots = url_map_[url_id];
    for (const auto& part : parts) slots.push_back(part.concrete);
  }
  for (const auto& [url_id, value] : hint_urls) {
    if (!url_map_.emplace(url_id, std::vector<std::optional<std::string>>{
                                      value})
             .second) {
      throw RunError("hint url '" + url_id + "' collides with an app url");
    }
  }
}

std::string Proxy::on_send_definition(const std::string& url_id, int part,
                                      const std::string& value) {
  auto it = url_map_.find(url_id);
  if (it == url_map_.end() || part < 1 ||
      part > static_cast<int>(it->second.size())) {
    throw RunError("unknown url part (" + url_id + ", " +
                   std::to_string(part) + ")");
  }
  std::string stored = value;
  for (const auto& rule : rewrite_rules_) {
    if (rule.url_id != url_id || rule.part != part || rule.find.empty()) {
      continue;
    }
    std::size_t pos = 0;
    while ((pos = stored.find(rule.find, pos)) != std::string::npos) {
      stored.replace(pos, rule.find.size(), rule.replace);
      pos += rule.replace.size();
    }
  }
  it->second[part - 1] = stored;
  return stored;
}

std::optional<std::string> Proxy::known_url(const std::string& url_id) const {
  auto it = url_map_.find(url_id);
  if (it == url_map_.end()) return std::nullopt;
  std::string url;
  for (const auto& part : it->second) {
    if (!part) return std::nullopt;
    url += *part;
  }
  return url;
}

TriggerEvalEvent Proxy::on_trigger_prefetch(
    const std::string& callback, const std::vector<std::string>& url_ids,
    std::int64_t now,
    const std::function<std::int64_t(const std::string&)>& latency_of,
    const NetModel& net, std::vector<PrefetchEvent>* issued_out) {
  TriggerEvalEvent eval;
  eval.callback = callback;
  eval.at = now;
  eval.considered = url_ids;
  for (const auto& url_id : url_ids) {
    if (!url_map_.count(url_id)) {
      throw RunError("trigger names unknown url '" + url_id + "'");
    }
    auto url = known_url(url_id);
    if (!url) {
      eval.skipped_unknown.push_back(url_id);
    } else if (cache_.count(*url)) {
      eval.skipped_known_cached.push_back(url_id);
    } else if (static_cast<int>(eval.issued.size()) >= threshold_) {
      eval.skipped_threshold.push_back(url_id);
    } else {
      const std::int64_t ready_at = now + latency_of(url_id);
      cache_[*url] = Entry{net.payload_for(*url), ready_at};
      eval.issued.push_back(url_id);
      if (issued_out) issued_out->push_back({url_id, *url, now, ready_at});
    }
  }
  return eval;
}

Proxy::FetchOutcome Proxy::on_fetch_from_proxy(const std::string& concrete_url,
                                               std::int64_t now,
                                               std::int64_t origin_latency_ms,
                                               const NetModel& net) {
  auto it = cache_.find(concrete_url);
  if (it != cache_.end()) {
    if (now >= it->second.ready_at) {
      return {it->second.payload, ServedFrom::kCache, 0};
    }
    return {it->second.payload, ServedFrom::kWaited,
            it->second.ready_at - now};
  }
  Entry entry{net.payload_for(concrete_url), now + origin_latency_ms};
  cache_.emplace(concrete_url, entry);
  return {entry.payload, ServedFrom::kOrigin, origin_latency_ms};
}

}  // namespace thinkahead::runtime
