#pragma once

// Two RGB images packed into one dual quaternion matrix X (pixel channels / 255 in the
// i, j, k slots), hidden as C = AX - YB with a public-to-the-holder book (A, B) and a
// secret key Y. A0 and B0 are invertible, so X is recovered uniquely.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "matrix_io.hpp"
#include "oracle.hpp"
#include "random.hpp"

namespace dqsylv {

// ---------------------------------------------------------------------------
// Images
// ---------------------------------------------------------------------------

struct ColorImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // row-major, 3 bytes per pixel

    ColorImage() = default;
    ColorImage(std::size_t w, std::size_t h, std::uint8_t fill = 0) : width(w), height(h), rgb(3 * w * h, fill) {}

    std::uint8_t& at(std::size_t row, std::size_t col, int ch) { return rgb[3 * (row * width + col) + ch]; }
    std::uint8_t at(std::size_t row, std::size_t col, int ch) const { return rgb[3 * (row * width + col) + ch]; }

    friend bool operator==(const ColorImage&, const ColorImage&) = default;
};

namespace detail {

// Next header token of a PNM file, skipping whitespace and '#' comments.
inline std::string pnm_token(std::istream& in) {
    std::string tok;
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {
            while ((c = in.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    if (tok.empty()) throw ParseError("ppm: truncated header");
    return tok;
}

inline std::size_t pnm_number(std::istream& in, const char* what) {
    const std::string tok = pnm_token(in);
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
        v = std::stoul(tok, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != tok.size()) throw ParseError(std::string("ppm: bad ") + what + " '" + tok + "'");
    return v;
}

}  // namespace detail

/// Binary PPM (P6) with maxval 255.
inline ColorImage read_ppm(std::istream& in) {
    if (detail::pnm_token(in) != "P6") throw ParseError("ppm: expected magic P6");
    const std::size_t w = detail::pnm_number(in, "width");
    const std::size_t h = detail::pnm_number(in, "height");
    const std::size_t maxval = detail::pnm_number(in, "maxval");
    if (maxval != 255) throw ParseError("ppm: only maxval 255 is supported, got " + std::to_string(maxval));
    if (w == 0 || h == 0) throw ParseError("ppm: empty image");
    // pnm_token consumed the single whitespace byte after maxval.
    ColorImage img(w, h);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (static_cast<std::size_t>(in.gcount()) != img.rgb.size())
        throw ParseError("ppm: expected " + std::to_string(img.rgb.size()) + " pixel bytes, got " +
                         std::to_string(in.gcount()));
    return img;
}

inline void write_ppm(std::ostream& out, const ColorImage& img) {
    out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
}

inline ColorImage load_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return read_ppm(in);
}

inline void save_ppm(const std::string& path, const ColorImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    write_ppm(out, img);
}

// ---------------------------------------------------------------------------
// Packing
// ---------------------------------------------------------------------------

inline QuatMatrix encode_image(const ColorImage& img) {
    QuatMatrix m(img.height, img.width);
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            m(r, c) = Quaternion(0.0, img.at(r, c, 0) / 255.0, img.at(r, c, 1) / 255.0, img.at(r, c, 2) / 255.0);
    return m;
}

inline std::uint8_t quantize_channel(double v) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

inline ColorImage decode_image(const QuatMatrix& m) {
    ColorImage img(m.cols(), m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            const Quaternion& q = m(r, c);
            img.at(r, c, 0) = quantize_channel(q.x);
            img.at(r, c, 1) = quantize_channel(q.y);
            img.at(r, c, 2) = quantize_channel(q.z);
        }
    return img;
}

/// img0 -> standard part, img1 -> infinitesimal part.
inline DualQuatMatrix encode_pair(const ColorImage& img0, const ColorImage& img1) {
    if (img0.width != img1.width || img0.height != img1.height)
        throw DimensionError("encode_pair: images are " + std::to_string(img0.width) + "x" +
                             std::to_string(img0.height) + " and " + std::to_string(img1.width) + "x" +
                             std::to_string(img1.height));
    return {encode_image(img0), encode_image(img1)};
}

inline std::pair<ColorImage, ColorImage> decode_pair(const DualQuatMatrix& x) {
    return {decode_image(x.standard()), decode_image(x.infinitesimal())};
}

// ---------------------------------------------------------------------------
// Keys
// ---------------------------------------------------------------------------

struct CipherBook {
    DualQuatMatrix A;  // n x n
    DualQuatMatrix B;  // m x m
    std::uint64_t seed = 0;
};

struct CipherKeys {
    CipherBook book;
    DualQuatMatrix Y;  // n x m
};

struct KeygenOptions {
    double max_condition = 1e6;
    std::size_t retries = 16;
};

/// 2-norm condition number of realify(a); infinity when singular.
inline double real_condition(const QuatMatrix& a) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(realify(a));
    const auto& s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double lo = s(s.size() - 1);
    return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

namespace detail {

inline QuatMatrix well_conditioned_square(Rng& rng, std::size_t n, const KeygenOptions& opt, const char* what) {
    for (std::size_t attempt = 0; attempt < opt.retries; ++attempt) {
        QuatMatrix a = random_matrix(rng, n, n);
        if (real_condition(a) <= opt.max_condition) return a;
    }
    throw NumericalError(std::string("keygen: no ") + what + " with condition number <= " +
                         std::to_string(opt.max_condition) + " after " + std::to_string(opt.retries) + " draws");
}

}  // namespace detail

/// Deterministic in `seed`. A0, B0 Gaussian with cond(realify) <= max_condition
/// (redrawn otherwise); A1, B1 Gaussian; Y uniform in [-1, 1] per component.
inline CipherKeys keygen(std::size_t n, std::size_t m, std::uint64_t seed, const KeygenOptions& opt = {}) {
    if (n == 0 || m == 0) throw DimensionError("keygen: dimensions must be positive");
    const Rng root(seed);
    Rng ra = root.split("book-A");
    Rng rb = root.split("book-B");
    Rng ry = root.split("key-Y");
    CipherKeys k;
    k.book.seed = seed;
    QuatMatrix a0 = detail::well_conditioned_square(ra, n, opt, "A0");
    k.book.A = DualQuatMatrix(std::move(a0), random_matrix(ra, n, n));
    QuatMatrix b0 = detail::well_conditioned_square(rb, m, opt, "B0");
    k.book.B = DualQuatMatrix(std::move(b0), random_matrix(rb, m, m));
    k.Y = DualQuatMatrix(random_uniform_matrix(ry, n, m, -1.0, 1.0), random_uniform_matrix(ry, n, m, -1.0, 1.0));
    return k;
}

inline void check_cipher_shapes(const DualQuatMatrix& x, const CipherBook& book, const DualQuatMatrix& y) {
    const std::size_t n = book.A.rows(), m = book.B.rows();
    if (book.A.cols() != n || book.B.cols() != m || x.rows() != n || x.cols() != m || y.rows() != n ||
        y.cols() != m)
        throw DimensionError("cipher: book A " + shape_str(book.A.rows(), book.A.cols()) + ", B " +
                             shape_str(book.B.rows(), book.B.cols()) + ", data " + shape_str(x.rows(), x.cols()) +
                             ", key " + shape_str(y.rows(), y.cols()));
}

/// C = A X - Y B
inline DualQuatMatrix encrypt(const DualQuatMatrix& x, const CipherBook& book, const DualQuatMatrix& y) {
    check_cipher_shapes(x, book, y);
    return book.A * x - y * book.B;
}

struct DecryptOptions {
    /// A decrypted entry whose real part or out-of-range channel exceeds this is not
    /// image data: the key or the ciphertext does not belong to this book.
    double plaintext_tol = 1e-6;
};

struct DecryptResult {
    DualQuatMatrix X;
    double residual = 0.0;         ///< |A X - Y B - C| / (1 + |C|)
    double max_real_part = 0.0;    ///< largest |Re x| over both parts
    double max_out_of_range = 0.0; ///< largest distance of an i, j, k component from [0, 1]
    bool plausible = false;        ///< X looks like an encoded image pair
};

/// X0 = A0^+ (C0 + Y0 B0), X1 = A0^+ (C1 + Y0 B1 + Y1 B0 - A1 X0).
inline DecryptResult decrypt(const DualQuatMatrix& c, const CipherBook& book, const DualQuatMatrix& y,
                             const DecryptOptions& opt = {}) {
    check_cipher_shapes(c, book, y);
    const QuatMatrix a0p = pinv(book.A.standard());
    const QuatMatrix& y0 = y.standard();
    const QuatMatrix& y1 = y.infinitesimal();
    const QuatMatrix& b0 = book.B.standard();
    const QuatMatrix& b1 = book.B.infinitesimal();
    QuatMatrix x0 = a0p * (c.standard() + y0 * b0);
    QuatMatrix x1 = a0p * (c.infinitesimal() + y0 * b1 + y1 * b0 - book.A.infinitesimal() * x0);

    DecryptResult out;
    out.X = DualQuatMatrix(std::move(x0), std::move(x1));
    out.residual = dq_norm(book.A * out.X - y * book.B - c) / (1.0 + dq_norm(c));
    auto scan = [&](const QuatMatrix& m) {
        for (const Quaternion& q : m.entries()) {
            out.max_real_part = std::max(out.max_real_part, std::abs(q.w));
            for (double v : {q.x, q.y, q.z})
                out.max_out_of_range = std::max(out.max_out_of_range, std::max(-v, v - 1.0));
        }
    };
    scan(out.X.standard());
    scan(out.X.infinitesimal());
    out.plausible = out.max_real_part <= opt.plaintext_tol && out.max_out_of_range <= opt.plaintext_tol;
    return out;
}

// ---------------------------------------------------------------------------
// Book storage: <dir>/A.dqm, <dir>/B.dqm, <dir>/book.txt ("dqcipher-v1 <seed> <n> <m>")
// ---------------------------------------------------------------------------

inline constexpr const char* kBookMagic = "dqcipher-v1";

inline void save_book(const std::filesystem::path& dir, const CipherBook& book) {
    std::filesystem::create_directories(dir);
    save_dqm((dir / "A.dqm").string(), book.A);
    save_dqm((dir / "B.dqm").string(), book.B);
    std::ofstream out(dir / "book.txt");
    if (!out) throw std::runtime_error("cannot write " + (dir / "book.txt").string());
    out << kBookMagic << ' ' << book.seed << ' ' << book.A.rows() << ' ' << book.B.rows() << '\n';
}

inline CipherBook load_book(const std::filesystem::path& dir) {
    std::ifstream in(dir / "book.txt");
    if (!in) throw std::runtime_error("cannot open " + (dir / "book.txt").string());
    std::string magic;
    CipherBook book;
    std::size_t n = 0, m = 0;
    if (!(in >> magic >> book.seed >> n >> m) || magic != kBookMagic)
        throw ParseError("book.txt: expected '" + std::string(kBookMagic) + " <seed> <n> <m>'");
    book.A = load_dqm((dir / "A.dqm").string());
    book.B = load_dqm((dir / "B.dqm").string());
    if (book.A.rows() != n || book.A.cols() != n || book.B.rows() != m || book.B.cols() != m)
        throw ParseError("book.txt: manifest dimensions " + std::to_string(n) + ", " + std::to_string(m) +
                         " do not match A " + shape_str(book.A.rows(), book.A.cols()) + " and B " +
                         shape_str(book.B.rows(), book.B.cols()));
    return book;
}

// ---------------------------------------------------------------------------
// SSIM: 8x8 uniform window, stride 1, L = 255, averaged over windows then channels
// ---------------------------------------------------------------------------

struct SsimOptions {
    std::size_t window = 8;
    double dynamic_range = 255.0;
    double k1 = 0.01;
    double k2 = 0.03;
};

inline double ssim(const ColorImage& ref, const ColorImage& test, const SsimOptions& opt = {}) {
    if (ref.width != test.width || ref.height != test.height)
        throw DimensionError("ssim: image sizes differ");
    const std::size_t w = opt.window;
    if (ref.width < w || ref.height < w)
        throw DimensionError("ssim: image smaller than the " + std::to_string(w) + "x" + std::to_string(w) +
                             " window");
    const double c1 = (opt.k1 * opt.dynamic_range) * (opt.k1 * opt.dynamic_range);
    const double c2 = (opt.k2 * opt.dynamic_range) * (opt.k2 * opt.dynamic_range);
    const double count = static_cast<double>(w * w);
    const std::size_t nr = ref.height - w + 1, nc = ref.width - w + 1;

    double total = 0.0;
    for (int ch = 0; ch < 3; ++ch) {
        double channel_sum = 0.0;
        for (std::size_t r0 = 0; r0 < nr; ++r0)
            for (std::size_t c0 = 0; c0 < nc; ++c0) {
                double sx = 0.0, sy = 0.0;
                for (std::size_t r = r0; r < r0 + w; ++r)
                    for (std::size_t c = c0; c < c0 + w; ++c) {
                        sx += ref.at(r, c, ch);
                        sy += test.at(r, c, ch);
                    }
                const double mx = sx / count, my = sy / count;
                double vx = 0.0, vy = 0.0, cov = 0.0;
                for (std::size_t r = r0; r < r0 + w; ++r)
                    for (std::size_t c = c0; c < c0 + w; ++c) {
                        const double dx = ref.at(r, c, ch) - mx;
                        const double dy = test.at(r, c, ch) - my;
                        vx += dx * dx;
                        vy += dy * dy;
                        cov += dx * dy;
                    }
                vx /= count;
                vy /= count;
                cov /= count;
                channel_sum += ((2.0 * mx * my + c1) * (2.0 * cov + c2)) /
                               ((mx * mx + my * my + c1) * (vx + vy + c2));
            }
        total += channel_sum / static_cast<double>(nr * nc);
    }
    return total / 3.0;
}

}  // namespace dqsylv
