#ifndef KPP_CSV_HPP
#define KPP_CSV_HPP

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

namespace kpp {

// Shortest round-trip decimal form, so identical inputs yield identical bytes.
inline std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_int(long long v) {
    char buf[24];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

class CsvWriter {
public:
    explicit CsvWriter(std::string_view header) { buf_.append(header); buf_.push_back('\n'); }

    CsvWriter& field(double v) { sep(); buf_ += format_double(v); return *this; }
    CsvWriter& field(long long v) { sep(); buf_ += format_int(v); return *this; }
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(std::string_view s) { sep(); buf_.append(s); return *this; }
    void end_row() { buf_.push_back('\n'); at_row_start_ = true; }

    const std::string& str() const { return buf_; }

private:
    void sep() {
        if (!at_row_start_) buf_.push_back(',');
        at_row_start_ = false;
    }
    std::string buf_;
    bool at_row_start_ = true;
};

} // namespace kpp

#endif
