#include "starcalc/json_writer.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace starcalc {

std::string format17(double v) {
    if (!std::isfinite(v))
        throw std::invalid_argument("JSON has no representation for non-finite numbers");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void write(const nlohmann::json& v, std::string& out) {
    switch (v.type()) {
    case nlohmann::json::value_t::object: {
        // nlohmann's default object type is a std::map, already key-sorted.
        out += '{';
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            if (!first)
                out += ',';
            first = false;
            out += nlohmann::json(key).dump();
            out += ':';
            write(item, out);
        }
        out += '}';
        break;
    }
    case nlohmann::json::value_t::array: {
        out += '[';
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0)
                out += ',';
            write(v[i], out);
        }
        out += ']';
        break;
    }
    case nlohmann::json::value_t::number_float:
        out += format17(v.get<double>());
        break;
    default:
        out += v.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
        break;
    }
}

} // namespace

std::string write_json(const nlohmann::json& value) {
    std::string out;
    write(value, out);
    return out;
}

} // namespace starcalc
