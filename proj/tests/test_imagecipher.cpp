#include "test_util.hpp"

using namespace dqsylv;
using namespace dqsylv::testing;

namespace {

ColorImage noise_image(std::size_t w, std::size_t h, std::uint64_t seed) {
    Rng rng(seed);
    ColorImage img(w, h);
    for (auto& b : img.rgb) b = static_cast<std::uint8_t>(rng.index(0, 255));
    return img;
}

}  // namespace

TEST(Ppm, RoundTripIsBitExact) {
    const ColorImage img = noise_image(7, 5, 1);
    std::stringstream ss;
    write_ppm(ss, img);
    EXPECT_EQ(read_ppm(ss), img);
}

TEST(Ppm, HeaderCommentsAreSkipped) {
    std::string data = "P6\n# made by hand\n2 1\n# another\n255\n";
    data += std::string("\x01\x02\x03\xfd\xfe\xff", 6);
    std::istringstream in(data);
    const ColorImage img = read_ppm(in);
    EXPECT_EQ(img.width, 2u);
    EXPECT_EQ(img.at(0, 1, 2), 0xff);
}

TEST(Ppm, RejectsUnsupportedOrTruncatedInput) {
    std::istringstream p3("P3\n1 1\n255\n0 0 0\n");
    EXPECT_THROW(read_ppm(p3), ParseError);
    std::istringstream deep("P6\n1 1\n65535\n");
    EXPECT_THROW(read_ppm(deep), ParseError);
    std::istringstream truncated("P6\n2 2\n255\nabc");
    EXPECT_THROW(read_ppm(truncated), ParseError);
}

TEST(Ppm, FileRoundTrip) {
    TempDir dir("ppm");
    const ColorImage img = noise_image(4, 3, 2);
    save_ppm(dir / "x.ppm", img);
    EXPECT_EQ(load_ppm(dir / "x.ppm"), img);
}

TEST(Encode, BlackPairIsZero) {
    const ColorImage black(3, 2, 0);
    EXPECT_EQ(encode_pair(black, black), DualQuatMatrix::zeros(2, 3));
}

TEST(Encode, WhiteBlackPixel) {
    const DualQuatMatrix m = encode_pair(ColorImage(1, 1, 255), ColorImage(1, 1, 0));
    EXPECT_EQ(m.standard()(0, 0), Quaternion(0, 1, 1, 1));
    EXPECT_EQ(m.infinitesimal()(0, 0), Quaternion(0));
}

TEST(Encode, DecodeInvertsEncodeExactly) {
    const ColorImage a = noise_image(6, 4, 3), b = noise_image(6, 4, 4);
    const auto [a2, b2] = decode_pair(encode_pair(a, b));
    EXPECT_EQ(a2, a);
    EXPECT_EQ(b2, b);
}

TEST(Encode, RejectsDifferentSizes) {
    EXPECT_THROW(encode_pair(ColorImage(2, 2), ColorImage(2, 3)), DimensionError);
}

TEST(Encode, QuantizeClamps) {
    EXPECT_EQ(quantize_channel(-0.2), 0);
    EXPECT_EQ(quantize_channel(1.3), 255);
    EXPECT_EQ(quantize_channel(0.5), 128);
}

TEST(Keygen, DeterministicInSeed) {
    const CipherKeys a = keygen(3, 4, 11), b = keygen(3, 4, 11), c = keygen(3, 4, 12);
    EXPECT_EQ(a.book.A, b.book.A);
    EXPECT_EQ(a.book.B, b.book.B);
    EXPECT_EQ(a.Y, b.Y);
    EXPECT_NE(a.book.A, c.book.A);
}

TEST(Keygen, ShapesAndConditioning) {
    const CipherKeys k = keygen(5, 3, 13);
    EXPECT_EQ(k.book.A.rows(), 5u);
    EXPECT_EQ(k.book.B.rows(), 3u);
    EXPECT_EQ(k.Y.rows(), 5u);
    EXPECT_EQ(k.Y.cols(), 3u);
    EXPECT_LE(real_condition(k.book.A.standard()), 1e6);
    EXPECT_LE(real_condition(k.book.B.standard()), 1e6);
}

TEST(Keygen, OneByOneBookIsInvertible) {
    const CipherKeys k = keygen(1, 1, 14);
    EXPECT_GT(k.book.A.standard()(0, 0).norm(), 0.0);
    EXPECT_GT(k.book.B.standard()(0, 0).norm(), 0.0);
    EXPECT_THROW(keygen(0, 1, 1), DimensionError);
}

TEST(Encrypt, ZeroDataAndKey) {
    const CipherKeys k = keygen(2, 3, 15);
    EXPECT_EQ(dq_norm(encrypt(DualQuatMatrix::zeros(2, 3), k.book, DualQuatMatrix::zeros(2, 3))), 0.0);
}

TEST(Encrypt, IdentityBookGivesDifference) {
    Rng rng(90);
    const CipherBook book{DualQuatMatrix::identity(2), DualQuatMatrix::identity(2), 0};
    const DualQuatMatrix x = random_dq_matrix(rng, 2, 2), y = random_dq_matrix(rng, 2, 2);
    EXPECT_LT(dist(encrypt(x, book, y), x - y), 1e-15);
}

TEST(Encrypt, RejectsMismatchedShapes) {
    const CipherKeys k = keygen(2, 3, 16);
    EXPECT_THROW(encrypt(DualQuatMatrix::zeros(3, 3), k.book, k.Y), DimensionError);
}

namespace {

// Entries of C that move by more than 1e-6 when pixel (row, col) of the first image is flipped.
std::vector<std::pair<std::size_t, std::size_t>> changed_entries(std::size_t w, std::size_t h, std::size_t row,
                                                                 std::size_t col) {
    const ColorImage a = noise_image(w, h, 5), b = noise_image(w, h, 6);
    const CipherKeys k = keygen(h, w, 17);
    const DualQuatMatrix c1 = encrypt(encode_pair(a, b), k.book, k.Y);
    ColorImage a2 = a;
    a2.at(row, col, 1) ^= 0x40;
    const DualQuatMatrix c2 = encrypt(encode_pair(a2, b), k.book, k.Y);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [p, q] : {std::pair{&c1.standard(), &c2.standard()}, {&c1.infinitesimal(), &c2.infinitesimal()}})
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c)
                if (dist((*p)(r, c), (*q)(r, c)) > 1e-6) out.emplace_back(r, c);
    return out;
}

}  // namespace

// A X only mixes along columns: one pixel reaches its whole ciphertext column in both
// parts and nothing else, i.e. a fraction 1/width of the entries.
TEST(Encrypt, OnePixelChangesItsWholeColumn) {
    const auto changed = changed_entries(8, 8, 3, 5);
    EXPECT_EQ(changed.size(), 2u * 8u);
    for (const auto& [r, c] : changed) EXPECT_EQ(c, 5u) << "row " << r;
}

TEST(Encrypt, HalfOfTheEntriesChangeForTwoColumnImages) {
    const auto changed = changed_entries(2, 9, 4, 0);
    EXPECT_GE(2 * changed.size(), 2u * 2u * 9u);
}

TEST(Decrypt, OfZeroCiphertextWithZeroKey) {
    const CipherKeys k = keygen(3, 3, 18);
    const DecryptResult r = decrypt(DualQuatMatrix::zeros(3, 3), k.book, DualQuatMatrix::zeros(3, 3));
    EXPECT_LT(dq_norm(r.X), 1e-14);
    EXPECT_TRUE(r.plausible);
}

TEST(Decrypt, FullPipelineRecoversImages) {
    const ColorImage a = noise_image(16, 16, 7), b = noise_image(16, 16, 8);
    const CipherKeys k = keygen(16, 16, 19);
    const DualQuatMatrix x = encode_pair(a, b);
    const DecryptResult r = decrypt(encrypt(x, k.book, k.Y), k.book, k.Y);
    EXPECT_TRUE(r.plausible);
    EXPECT_LE(r.residual, 1e-12);
    EXPECT_LE(dist(r.X, x) / dq_norm(x), 1e-9);
    const auto [a2, b2] = decode_pair(r.X);
    EXPECT_EQ(a2, a);
    EXPECT_EQ(b2, b);
}

TEST(Decrypt, WrongKeyIsRejected) {
    const ColorImage a = noise_image(12, 12, 9), b = noise_image(12, 12, 10);
    const CipherKeys k = keygen(12, 12, 20), other = keygen(12, 12, 21);
    const DualQuatMatrix c = encrypt(encode_pair(a, b), k.book, k.Y);
    EXPECT_FALSE(decrypt(c, k.book, other.Y).plausible);
    EXPECT_FALSE(decrypt(c, other.book, other.Y).plausible);
}

TEST(Book, SaveLoadRoundTrip) {
    TempDir dir("book");
    const CipherKeys k = keygen(3, 2, 22);
    save_book(dir.path() / "bk", k.book);
    const CipherBook b = load_book(dir.path() / "bk");
    EXPECT_EQ(b.A, k.book.A);
    EXPECT_EQ(b.B, k.book.B);
    EXPECT_EQ(b.seed, 22u);
    EXPECT_THROW(load_book(dir.path() / "nothing"), std::runtime_error);
}

TEST(Ssim, IdenticalImagesScoreOne) {
    const ColorImage a = noise_image(16, 12, 11);
    EXPECT_EQ(ssim(a, a), 1.0);
}

TEST(Ssim, ConstantGrayOffsetByOneMatchesClosedForm) {
    const double g = 100.0, c1 = (0.01 * 255) * (0.01 * 255);
    const double expected = (2 * g * (g + 1) + c1) / (g * g + (g + 1) * (g + 1) + c1);
    const double s = ssim(ColorImage(10, 10, 100), ColorImage(10, 10, 101));
    EXPECT_NEAR(s, expected, 1e-14);
    EXPECT_GT(s, 0.9999);
    EXPECT_LT(s, 1.0);
}

TEST(Ssim, SymmetricAndBounded) {
    const ColorImage a = noise_image(12, 12, 12), b = noise_image(12, 12, 13);
    EXPECT_DOUBLE_EQ(ssim(a, b), ssim(b, a));
    EXPECT_LT(ssim(a, b), 0.5);
    EXPECT_GE(ssim(a, b), -1.0);
}

TEST(Ssim, RejectsSmallOrMismatchedImages) {
    EXPECT_THROW(ssim(ColorImage(7, 7), ColorImage(7, 7)), DimensionError);
    EXPECT_THROW(ssim(ColorImage(8, 8), ColorImage(9, 8)), DimensionError);
}
