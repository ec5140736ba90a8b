#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <ostream>
#include <set>
#include <string>

#include "tca/service/outbox.hpp"

namespace tca {

enum class DeliveryResult { ok, retryable_failure, permanent_failure };

/// Delivery is at-least-once; adapters dedupe on message_id.
class ChannelAdapter {
 public:
  virtual ~ChannelAdapter() = default;
  virtual DeliveryResult deliver(const OutboxMessage& message) = 0;
};

/// Writes one line per delivered message to a stream.
class LogAdapter final : public ChannelAdapter {
 public:
  explicit LogAdapter(std::ostream& out) : out_(out) {}
  DeliveryResult deliver(const OutboxMessage& message) override;

 private:
  std::mutex mutex_;
  std::ostream& out_;
  std::set<std::string> seen_;
};

/// Appends deliveries to a JSON Lines file, skipping message ids already in the file.
class FileAdapter final : public ChannelAdapter {
 public:
  explicit FileAdapter(std::filesystem::path file);
  DeliveryResult deliver(const OutboxMessage& message) override;
  std::size_t delivered_count() const;

 private:
  mutable std::mutex mutex_;
  std::filesystem::path path_;
  std::ofstream out_;
  std::set<std::string> seen_;
};

}  // namespace tca

TCA_ENUM_NAMES(tca::DeliveryResult, "ok"sv, "retryable_failure"sv, "permanent_failure"sv);
