#pragma once

#include <initializer_list>
#include <iostream>
#include <mutex>
#include <string>
#include <utility>

#include <json.hpp>

namespace ethver {

/// One JSON object per line, so long runs stay machine-auditable.
class JsonLogger {
public:
    explicit JsonLogger(std::ostream* sink = nullptr) : sink_(sink) {}

    using Field = std::pair<std::string, std::string>;

    void event(const std::string& name, std::initializer_list<Field> fields = {}) {
        write("info", name, fields);
    }
    void warn(const std::string& name, std::initializer_list<Field> fields = {}) {
        write("warn", name, fields);
    }
    void error(const std::string& name, std::initializer_list<Field> fields = {}) {
        write("error", name, fields);
    }

private:
    void write(const char* level, const std::string& name,
               std::initializer_list<Field> fields) {
        if (sink_ == nullptr) return;
        nlohmann::json line;
        line["level"] = level;
        line["event"] = name;
        for (const auto& [k, v] : fields) line[k] = v;
        std::lock_guard lock(mu_);
        (*sink_) << line.dump() << "\n";
    }

    std::ostream* sink_;
    std::mutex mu_;
};

} // namespace ethver
