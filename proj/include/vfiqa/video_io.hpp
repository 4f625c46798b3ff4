#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vfiqa/errors.hpp"
#include "vfiqa/frame.hpp"

namespace vfiqa {

namespace detail {

inline bool read_exact(std::istream& in, uint8_t* dst, size_t count, size_t& got) {
    in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count));
    got = static_cast<size_t>(in.gcount());
    return got == count;
}

}  // namespace detail

// Streaming reader for headerless I420 data: full Y plane, then U, then V per
// frame. Frames are yielded one at a time so long sequences never need to be
// resident in full.
class RawYuvReader {
public:
    RawYuvReader(std::istream& in, int width, int height) : in_(in), width_(width), height_(height) {
        check_yuv420_dimensions(width, height);
    }

    std::optional<Frame> next() {
        Frame f = make_frame(width_, height_, next_index_);
        size_t got = 0;
        if (!detail::read_exact(in_, f.y.data(), f.y.size(), got)) {
            if (got == 0 && in_.eof()) return std::nullopt;
            throw partial_error(got);
        }
        size_t got_u = 0, got_v = 0;
        bool ok_u = detail::read_exact(in_, f.u.data(), f.u.size(), got_u);
        bool ok_v = ok_u && detail::read_exact(in_, f.v.data(), f.v.size(), got_v);
        if (!ok_u || !ok_v) throw partial_error(got + got_u + got_v);
        ++next_index_;
        return f;
    }

    int width() const { return width_; }
    int height() const { return height_; }

private:
    IoError partial_error(size_t got) const {
        size_t expected = static_cast<size_t>(width_) * static_cast<size_t>(height_) * 3 / 2;
        return IoError("partial frame at index " + std::to_string(next_index_) + ": expected " +
                       std::to_string(expected) + " bytes, got " + std::to_string(got));
    }

    std::istream& in_;
    int width_;
    int height_;
    int64_t next_index_ = 0;
};

inline VideoSequence read_raw_yuv420(std::istream& in, int width, int height) {
    RawYuvReader reader(in, width, height);
    VideoSequence seq;
    while (auto f = reader.next()) seq.frames.push_back(std::move(*f));
    return seq;
}

inline void write_raw_yuv420(const Frame& frame, std::ostream& out) {
    out.write(reinterpret_cast<const char*>(frame.y.data()), static_cast<std::streamsize>(frame.y.size()));
    out.write(reinterpret_cast<const char*>(frame.u.data()), static_cast<std::streamsize>(frame.u.size()));
    out.write(reinterpret_cast<const char*>(frame.v.data()), static_cast<std::streamsize>(frame.v.size()));
    if (!out) throw IoError("raw yuv write failed");
}

inline void write_raw_yuv420(const VideoSequence& seq, std::ostream& out) {
    for (const Frame& f : seq.frames) write_raw_yuv420(f, out);
}

// Streaming YUV4MPEG2 reader. Only 8-bit 4:2:0 colorspaces are accepted;
// interlacing and aspect tags are parsed and ignored.
class Y4mReader {
public:
    explicit Y4mReader(std::istream& in) : in_(in) { parse_header(); }

    std::optional<Frame> next() {
        std::string marker;
        if (!read_line(marker)) return std::nullopt;
        if (marker.rfind("FRAME", 0) != 0)
            throw IoError("y4m: expected FRAME marker before frame " + std::to_string(next_index_) +
                          ", got \"" + marker.substr(0, 16) + "\"");
        Frame f = make_frame(width_, height_, next_index_);
        read_plane(f.y, "Y");
        read_plane(f.u, "U");
        read_plane(f.v, "V");
        ++next_index_;
        return f;
    }

    int width() const { return width_; }
    int height() const { return height_; }
    FrameRate frame_rate() const { return rate_; }

private:
    static constexpr size_t kMaxHeaderLine = 4096;

    bool read_line(std::string& line) {
        line.clear();
        char c;
        if (!in_.get(c)) return false;
        while (c != '\n') {
            line.push_back(c);
            if (line.size() > kMaxHeaderLine) throw IoError("y4m: unterminated header line");
            if (!in_.get(c)) throw IoError("y4m: stream ends inside header line");
        }
        return true;
    }

    void parse_header() {
        std::string line;
        if (!read_line(line) || line.rfind("YUV4MPEG2", 0) != 0)
            throw IoError("y4m: missing YUV4MPEG2 signature");

        bool have_w = false, have_h = false, have_f = false;
        std::istringstream tokens(line);
        std::string tok;
        tokens >> tok;  // signature
        while (tokens >> tok) {
            if (tok.empty()) continue;
            char tag = tok[0];
            std::string val = tok.substr(1);
            switch (tag) {
                case 'W':
                    width_ = parse_int(val, "W");
                    have_w = true;
                    break;
                case 'H':
                    height_ = parse_int(val, "H");
                    have_h = true;
                    break;
                case 'F':
                    rate_ = parse_ratio(val, "F");
                    have_f = true;
                    break;
                case 'C':
                    if (val != "420" && val != "420jpeg" && val != "420paldv" && val != "420mpeg2")
                        throw IoError("y4m: unsupported colorspace C" + val +
                                      " (only 8-bit 4:2:0 is supported)");
                    break;
                case 'I':
                case 'A':
                case 'X':
                    break;  // parsed and ignored
                default:
                    break;  // unknown tags tolerated
            }
        }
        if (!have_w || !have_h || !have_f)
            throw IoError("y4m: header must declare W, H and F parameters");
        check_yuv420_dimensions(width_, height_);
        if (rate_.num <= 0 || rate_.den <= 0) throw IoError("y4m: invalid frame rate");
    }

    static int parse_int(const std::string& s, const char* tag) {
        try {
            size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) throw std::invalid_argument(s);
            return v;
        } catch (const std::exception&) {
            throw IoError(std::string("y4m: bad ") + tag + " parameter \"" + s + "\"");
        }
    }

    static FrameRate parse_ratio(const std::string& s, const char* tag) {
        size_t colon = s.find(':');
        if (colon == std::string::npos)
            throw IoError(std::string("y4m: bad ") + tag + " parameter \"" + s + "\"");
        FrameRate r;
        r.num = parse_int(s.substr(0, colon), tag);
        r.den = parse_int(s.substr(colon + 1), tag);
        return r;
    }

    void read_plane(std::vector<uint8_t>& plane, const char* name) {
        size_t got = 0;
        if (!detail::read_exact(in_, plane.data(), plane.size(), got))
            throw IoError("y4m: truncated " + std::string(name) + " plane in frame " +
                          std::to_string(next_index_) + ": expected " + std::to_string(plane.size()) +
                          " bytes, got " + std::to_string(got));
    }

    std::istream& in_;
    int width_ = 0;
    int height_ = 0;
    FrameRate rate_{};
    int64_t next_index_ = 0;
};

inline VideoSequence read_y4m(std::istream& in) {
    Y4mReader reader(in);
    VideoSequence seq;
    seq.frame_rate = reader.frame_rate();
    while (auto f = reader.next()) seq.frames.push_back(std::move(*f));
    return seq;
}

inline void write_y4m(const VideoSequence& seq, std::ostream& out) {
    if (seq.frames.empty()) throw std::invalid_argument("write_y4m: empty sequence");
    const Frame& first = seq.frames.front();
    check_yuv420_dimensions(first.width, first.height);
    FrameRate rate = seq.frame_rate;
    if (rate.num <= 0 || rate.den <= 0) rate = FrameRate{25, 1};
    out << "YUV4MPEG2 W" << first.width << " H" << first.height << " F" << rate.num << ":"
        << rate.den << " Ip A1:1 C420mpeg2\n";
    for (const Frame& f : seq.frames) {
        if (f.width != first.width || f.height != first.height)
            throw std::invalid_argument("write_y4m: frame dimensions differ within sequence");
        out << "FRAME\n";
        write_raw_yuv420(f, out);
    }
    if (!out) throw IoError("y4m write failed");
}

}  // namespace vfiqa
