#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mosaic {

// Data-quality warnings (not errors). The default sink writes to stderr.
using WarningSink = std::function<void(const std::string&)>;

void set_warning_sink(WarningSink sink);
void reset_warning_sink();
void warn(const std::string& message);

// RAII capture, used by tests and by the CLI run report. Restores the
// previous sink on destruction.
class ScopedWarningCapture {
public:
    ScopedWarningCapture();
    ~ScopedWarningCapture();
    ScopedWarningCapture(const ScopedWarningCapture&) = delete;
    ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

    const std::vector<std::string>& messages() const { return messages_; }

private:
    std::vector<std::string> messages_;
    WarningSink previous_;
};

}  // namespace mosaic
