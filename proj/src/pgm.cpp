#include "rnsift/pgm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace rnsift {

namespace {

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    while (true) {
        int c = in.peek();
        if (c == EOF) throw std::runtime_error("PGM header truncated: " + path);
        if (std::isspace(c)) { in.get(); continue; }
        if (c == '#') { std::string line; std::getline(in, line); continue; }
        break;
    }
    int value = 0;
    if (!(in >> value)) throw std::runtime_error("PGM header unreadable: " + path);
    return value;
}

} // namespace

Image read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image: " + path);

    char p = 0, kind = 0;
    in.get(p).get(kind);
    if (p != 'P' || (kind != '2' && kind != '5'))
        throw std::runtime_error("not an 8-bit PGM (P2/P5): " + path);

    const int width = next_header_int(in, path);
    const int height = next_header_int(in, path);
    const int maxval = next_header_int(in, path);
    if (width <= 0 || height <= 0)
        throw std::runtime_error("PGM with nonpositive dimensions: " + path);
    if (maxval <= 0 || maxval > 255)
        throw std::runtime_error("only 8-bit PGM supported (maxval <= 255): " + path);

    Image img(width, height);
    const std::size_t count = img.size();
    if (kind == '5') {
        in.get(); // single whitespace after maxval
        std::vector<unsigned char> raw(count);
        in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw std::runtime_error("PGM pixel data truncated: " + path);
        for (std::size_t i = 0; i < count; ++i) img.data()[i] = raw[i];
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            int v = 0;
            if (!(in >> v)) throw std::runtime_error("PGM pixel data truncated: " + path);
            if (v < 0 || v > maxval)
                throw std::runtime_error("PGM pixel out of range: " + path);
            img.data()[i] = v;
        }
    }
    return img;
}

void write_pgm(const Image& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write image: " + path);
    out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
    std::vector<unsigned char> raw(image.size());
    for (std::size_t i = 0; i < image.size(); ++i) {
        double v = std::lround(image.data()[i]);
        raw[i] = static_cast<unsigned char>(v < 0 ? 0 : (v > 255 ? 255 : v));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

} // namespace rnsift
