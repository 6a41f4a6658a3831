#include "mosaic/diagnostics.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace mosaic {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

WarningSink& sink() {
    static WarningSink s;
    return s;
}

}  // namespace

void set_warning_sink(WarningSink s) {
    std::lock_guard lock(sink_mutex());
    sink() = std::move(s);
}

void reset_warning_sink() { set_warning_sink(nullptr); }

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) {
        sink()(message);
    } else {
        std::cerr << "warning: " << message << '\n';
    }
}

ScopedWarningCapture::ScopedWarningCapture() {
    std::lock_guard lock(sink_mutex());
    previous_ = std::exchange(sink(), [this](const std::string& m) { messages_.push_back(m); });
}

ScopedWarningCapture::~ScopedWarningCapture() { set_warning_sink(std::move(previous_)); }

}  // namespace mosaic
