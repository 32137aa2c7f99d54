#pragma once

#include <chrono>
#include <iostream>
#include <string>

#include <json.hpp>

namespace ppibench {

// JSON-lines logging to stderr: {"level", "stage", "elapsed", "msg", ...}.
class Logger {
  public:
    explicit Logger(std::string stage) : stage_(std::move(stage)), start_(clock::now()) {}

    void info(const std::string& msg, nlohmann::json extra = {}) { emit("info", msg, std::move(extra)); }
    void warn(const std::string& msg, nlohmann::json extra = {}) { emit("warn", msg, std::move(extra)); }
    void error(const std::string& msg, nlohmann::json extra = {}) { emit("error", msg, std::move(extra)); }

    double elapsed_s() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }

  private:
    using clock = std::chrono::steady_clock;

    void emit(const char* level, const std::string& msg, nlohmann::json extra) {
        nlohmann::json j{{"level", level}, {"stage", stage_}, {"elapsed", elapsed_s()}, {"msg", msg}};
        if (extra.is_object())
            for (auto& [k, v] : extra.items()) j[k] = v;
        std::cerr << j.dump() << '\n';
    }

    std::string stage_;
    clock::time_point start_;
};

}  // namespace ppibench
