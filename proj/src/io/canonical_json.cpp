// Copyright 2026 The vtprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "vtprune/io/canonical_json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "vtprune/error.hpp"

namespace vtprune::io {

namespace {

void emit(const Json& v, int depth, std::string& out) {
    const std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
    const std::string inner(static_cast<std::size_t>(depth + 1) * 2, ' ');
    switch (v.type()) {
    case Json::value_t::object: {
        if (v.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        bool first = true;
        for (const auto& [key, item] : v.items()) {
            if (!first) {
                out += ",\n";
            }
            first = false;
            out += inner + Json(key).dump() + ": ";
            emit(item, depth + 1, out);
        }
        out += "\n" + pad + "}";
        return;
    }
    case Json::value_t::array: {
        if (v.empty()) {
            out += "[]";
            return;
        }
        // Arrays of scalars stay on one line.
        const bool flat = std::all_of(v.begin(), v.end(), [](const Json& x) { return x.is_primitive(); });
        if (flat) {
            out += "[";
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i > 0) {
                    out += ", ";
                }
                emit(v[i], depth + 1, out);
            }
            out += "]";
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) {
                out += ",\n";
            }
            out += inner;
            emit(v[i], depth + 1, out);
        }
        out += "\n" + pad + "]";
        return;
    }
    case Json::value_t::number_float: out += format_real(v.get<double>()); return;
    default: out += v.dump(); return;
    }
}

}  // namespace

std::string format_real(double value) {
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::Internal, "non-finite value in report");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*g", kReportSignificantDigits, value == 0.0 ? 0.0 : value);
    return buf;
}

std::string canonical_dump(const Json& value) {
    std::string out;
    emit(value, 0, out);
    out += "\n";
    return out;
}

}  // namespace vtprune::io
