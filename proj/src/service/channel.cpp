#include "tca/service/channel.hpp"

#include <fmt/format.h>

#include "tca/core/error.hpp"

namespace tca {

DeliveryResult LogAdapter::deliver(const OutboxMessage& message) {
  std::lock_guard lock(mutex_);
  if (!seen_.insert(message.message_id).second) return DeliveryResult::ok;
  out_ << fmt::format("[deliver] {} {} {}\n", message.participant_id, to_string(message.kind), message.message_id);
  out_.flush();
  return DeliveryResult::ok;
}

FileAdapter::FileAdapter(std::filesystem::path file) : path_(std::move(file)) {
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      try {
        seen_.insert(Json::parse(line).at("message_id").get<std::string>());
      } catch (const std::exception&) {
        // a torn line from a crash; the message is delivered again
      }
    }
  }
  out_.open(path_, std::ios::app);
  require(out_.good(), ErrorCode::storage, "cannot open delivery file " + path_.string());
}

DeliveryResult FileAdapter::deliver(const OutboxMessage& message) {
  std::lock_guard lock(mutex_);
  if (seen_.count(message.message_id)) return DeliveryResult::ok;
  out_ << Json{{"message_id", message.message_id},
               {"participant_id", message.participant_id},
               {"kind", message.kind},
               {"body", message.body}}
              .dump()
       << '\n';
  out_.flush();
  if (!out_.good()) return DeliveryResult::retryable_failure;
  seen_.insert(message.message_id);
  return DeliveryResult::ok;
}

std::size_t FileAdapter::delivered_count() const {
  std::lock_guard lock(mutex_);
  return seen_.size();
}

}  // namespace tca
