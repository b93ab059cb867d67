#include "shadowroad/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace shadowroad {

namespace {

std::uint8_t to_byte(double v) {
    const double q = std::round(v * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0.0, 255.0));
}

std::vector<std::uint8_t> read_all(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("unreadable file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw Error("unreadable file: " + path);
    return bytes;
}

// --- PNM (PPM P6 / PGM P5) ---------------------------------------------

struct PnmHeader {
    int magic = 0;  // 5 or 6
    int width = 0, height = 0, maxval = 0;
    std::size_t data_offset = 0;
};

// Header tokens separated by whitespace; '#' starts a comment to end of line.
PnmHeader parse_pnm_header(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < bytes.size()) {
            if (std::isspace(bytes[pos])) {
                ++pos;
            } else if (bytes[pos] == '#') {
                while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        bool any = false;
        while (pos < bytes.size() && std::isdigit(bytes[pos])) {
            v = v * 10 + (bytes[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any) throw Error("unsupported format: " + path);
        return v;
    };

    PnmHeader h;
    h.magic = bytes[1] - '0';
    h.width = static_cast<int>(next_token());
    h.height = static_cast<int>(next_token());
    h.maxval = static_cast<int>(next_token());
    if (pos >= bytes.size() || !std::isspace(bytes[pos])) throw Error("unsupported format: " + path);
    h.data_offset = pos + 1;
    if (h.width < 1 || h.height < 1) throw Error("unsupported format: " + path);
    if (h.maxval < 1 || h.maxval > 255) throw Error("unsupported format: " + path + " (maxval " + std::to_string(h.maxval) + ")");
    return h;
}

RgbImage load_pnm(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    const PnmHeader h = parse_pnm_header(bytes, path);
    const int channels = h.magic == 6 ? 3 : 1;
    const std::size_t need = static_cast<std::size_t>(h.width) * h.height * channels;
    if (bytes.size() - h.data_offset < need) throw Error("unsupported format: " + path + " (truncated)");

    RgbImage img(h.width, h.height);
    const std::uint8_t* p = bytes.data() + h.data_offset;
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        double r, g, b;
        if (channels == 3) {
            r = p[3 * i] / 255.0;
            g = p[3 * i + 1] / 255.0;
            b = p[3 * i + 2] / 255.0;
        } else {
            r = g = b = p[i] / 255.0;
        }
        img.data()[3 * i + 0] = r;
        img.data()[3 * i + 1] = g;
        img.data()[3 * i + 2] = b;
    }
    return img;
}

void write_pnm(const std::string& path, int magic, int width, int height, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write file: " + path);
    f << "P" << magic << "\n" << width << " " << height << "\n255\n";
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("cannot write file: " + path);
}

// --- PNG ----------------------------------------------------------------

struct PngReadCtx {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
    auto* ctx = static_cast<PngReadCtx*>(png_get_io_ptr(png));
    if (ctx->pos + len > ctx->size) png_error(png, "truncated png");
    std::memcpy(out, ctx->data + ctx->pos, len);
    ctx->pos += len;
}

RgbImage load_png(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error("png init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw Error("png init failed");
    }

    std::vector<std::uint8_t> pixels;
    int width = 0, height = 0;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error("unsupported format: " + path + " (corrupt png)");
    }

    PngReadCtx ctx{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &ctx, png_mem_read);
    png_read_info(png, info);

    // Normalize everything to 8-bit RGB.
    png_set_palette_to_rgb(png);
    png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y) rows[y] = pixels.data() + y * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    RgbImage img(width, height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t* row = pixels.data() + y * stride;
        for (int x = 0; x < width; ++x) {
            img.set(x, y, Rgb{row[3 * x] / 255.0, row[3 * x + 1] / 255.0, row[3 * x + 2] / 255.0});
        }
    }
    return img;
}

void write_png(const std::string& path, int width, int height, int color_type,
               const std::vector<std::uint8_t>& bytes, int channels) {
    FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error("cannot write file: " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info || setjmp(png_jmpbuf(png))) {
        if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
        std::fclose(fp);
        throw Error("cannot write file: " + path);
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, width, height, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> rows(height);
    for (int y = 0; y < height; ++y)
        rows[y] = const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * width * channels);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_png(const std::vector<std::uint8_t>& bytes) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return bytes.size() >= 8 && std::memcmp(bytes.data(), sig, 8) == 0;
}

}  // namespace

RgbImage load_image(const std::string& path) {
    const auto bytes = read_all(path);
    if (is_png(bytes)) return load_png(bytes, path);
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6'))
        return load_pnm(bytes, path);
    throw Error("unsupported format: " + path);
}

void save_image(const RgbImage& img, const std::string& path) {
    std::vector<std::uint8_t> bytes(img.pixel_count() * 3);
    for (std::size_t i = 0; i < img.pixel_count(); ++i) {
        bytes[3 * i + 0] = to_byte(img.channel(i, 0));
        bytes[3 * i + 1] = to_byte(img.channel(i, 1));
        bytes[3 * i + 2] = to_byte(img.channel(i, 2));
    }
    if (has_suffix(path, ".ppm")) {
        write_pnm(path, 6, img.width(), img.height(), bytes);
    } else if (has_suffix(path, ".png")) {
        write_png(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, bytes, 3);
    } else {
        throw Error("unsupported format: " + path + " (expected .png or .ppm)");
    }
}

void save_mask(const BinaryMask& mask, const std::string& path) {
    std::vector<std::uint8_t> bytes(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask.get(i) ? 255 : 0;
    if (has_suffix(path, ".pgm")) {
        write_pnm(path, 5, mask.width(), mask.height(), bytes);
    } else if (has_suffix(path, ".png")) {
        write_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, bytes, 1);
    } else {
        throw Error("unsupported format: " + path + " (expected .png or .pgm)");
    }
}

BinaryMask load_mask(const std::string& path) {
    const RgbImage img = load_image(path);
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.pixel_count(); ++i)
        mask.put(i, img.channel(i, 0) > 0.0 || img.channel(i, 1) > 0.0 || img.channel(i, 2) > 0.0);
    return mask;
}

void save_gray(const GrayMap& map, double lo, double hi, const std::string& path) {
    std::vector<std::uint8_t> bytes(map.size());
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t i = 0; i < map.size(); ++i)
        bytes[i] = to_byte((map[i] - lo) / span);
    write_pnm(path, 5, map.width(), map.height(), bytes);
}

}  // namespace shadowroad
