#pragma once

// Text formats:
//   .qm   "qm <rows> <cols>" then rows*cols lines "w x y z" (row-major)
//   .dqm  "dqm <rows> <cols>", the standard block, a line "---", the infinitesimal block

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dual_quat_matrix.hpp"

namespace dqsylv {

namespace detail {

inline std::string format_quaternion(const Quaternion& q) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g", q.w, q.x, q.y, q.z);
    return buf;
}

inline bool next_content_line(std::istream& in, std::string& line, std::size_t& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
}

inline void read_header(std::istream& in, const std::string& magic, std::size_t& rows, std::size_t& cols,
                        std::size_t& lineno) {
    std::string line;
    if (!next_content_line(in, line, lineno)) throw ParseError("empty input, expected '" + magic + "' header");
    std::istringstream hs(line);
    std::string tag;
    long long r = -1;
    long long c = -1;
    std::string extra;
    if (!(hs >> tag >> r >> c) || tag != magic || r < 0 || c < 0 || (hs >> extra))
        throw ParseError("line " + std::to_string(lineno) + ": expected '" + magic + " <rows> <cols>'");
    rows = static_cast<std::size_t>(r);
    cols = static_cast<std::size_t>(c);
}

inline QuatMatrix read_body(std::istream& in, std::size_t rows, std::size_t cols, std::size_t& lineno) {
    QuatMatrix m(rows, cols);
    std::string line;
    for (auto& q : m.entries()) {
        if (!next_content_line(in, line, lineno))
            throw ParseError("unexpected end of input after line " + std::to_string(lineno));
        std::istringstream ls(line);
        std::string extra;
        if (!(ls >> q.w >> q.x >> q.y >> q.z) || (ls >> extra))
            throw ParseError("line " + std::to_string(lineno) + ": expected four real numbers");
    }
    return m;
}

inline void write_body(std::ostream& out, const QuatMatrix& m) {
    for (const auto& q : m.entries()) out << format_quaternion(q) << '\n';
}

inline void expect_end(std::istream& in, std::size_t& lineno) {
    std::string line;
    if (next_content_line(in, line, lineno))
        throw ParseError("line " + std::to_string(lineno) + ": trailing content");
}

}  // namespace detail

inline void write_qm(std::ostream& out, const QuatMatrix& m) {
    out << "qm " << m.rows() << ' ' << m.cols() << '\n';
    detail::write_body(out, m);
}

inline QuatMatrix read_qm(std::istream& in) {
    std::size_t lineno = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    detail::read_header(in, "qm", rows, cols, lineno);
    QuatMatrix m = detail::read_body(in, rows, cols, lineno);
    detail::expect_end(in, lineno);
    return m;
}

inline void write_dqm(std::ostream& out, const DualQuatMatrix& m) {
    out << "dqm " << m.rows() << ' ' << m.cols() << '\n';
    detail::write_body(out, m.standard());
    out << "---\n";
    detail::write_body(out, m.infinitesimal());
}

inline DualQuatMatrix read_dqm(std::istream& in) {
    std::size_t lineno = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    detail::read_header(in, "dqm", rows, cols, lineno);
    QuatMatrix s = detail::read_body(in, rows, cols, lineno);
    std::string line;
    std::string sep;
    if (!detail::next_content_line(in, line, lineno) || !(std::istringstream(line) >> sep) || sep != "---")
        throw ParseError("line " + std::to_string(lineno) + ": expected '---' separator");
    QuatMatrix i = detail::read_body(in, rows, cols, lineno);
    detail::expect_end(in, lineno);
    return {std::move(s), std::move(i)};
}

namespace detail {

template <class T, class Reader>
T read_file(const std::string& path, Reader reader) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    try {
        return reader(in);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <class Writer>
void write_file(const std::string& path, Writer writer) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    writer(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace detail

inline QuatMatrix load_qm(const std::string& path) {
    return detail::read_file<QuatMatrix>(path, [](std::istream& in) { return read_qm(in); });
}
inline DualQuatMatrix load_dqm(const std::string& path) {
    return detail::read_file<DualQuatMatrix>(path, [](std::istream& in) { return read_dqm(in); });
}
inline void save_qm(const std::string& path, const QuatMatrix& m) {
    detail::write_file(path, [&](std::ostream& out) { write_qm(out, m); });
}
inline void save_dqm(const std::string& path, const DualQuatMatrix& m) {
    detail::write_file(path, [&](std::ostream& out) { write_dqm(out, m); });
}

}  // namespace dqsylv
