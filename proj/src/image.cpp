#include "shadowroad/image.hpp"

#include <algorithm>
#include <set>

namespace shadowroad {

StructuringElement::StructuringElement(std::vector<std::pair<int, int>> offsets)
    : offsets_(std::move(offsets)) {
    if (offsets_.empty()) throw Error("structuring element: empty offset set");
    std::set<std::pair<int, int>> seen(offsets_.begin(), offsets_.end());
    if (seen.size() != offsets_.size()) throw Error("structuring element: duplicate offsets");
    if (!seen.count({0, 0})) throw Error("structuring element: origin missing");
    spec_ = "custom";
}

StructuringElement StructuringElement::square(int n) {
    if (n < 1 || n % 2 == 0) throw Error("structuring element: size must be odd and >= 1");
    const int r = n / 2;
    std::vector<std::pair<int, int>> offs;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) offs.emplace_back(dy, dx);
    StructuringElement se(std::move(offs));
    se.spec_ = "square:" + std::to_string(n);
    return se;
}

StructuringElement StructuringElement::cross(int n) {
    if (n < 1 || n % 2 == 0) throw Error("structuring element: size must be odd and >= 1");
    const int r = n / 2;
    std::vector<std::pair<int, int>> offs;
    offs.emplace_back(0, 0);
    for (int d = 1; d <= r; ++d) {
        offs.emplace_back(0, d);
        offs.emplace_back(0, -d);
        offs.emplace_back(d, 0);
        offs.emplace_back(-d, 0);
    }
    StructuringElement se(std::move(offs));
    se.spec_ = "cross:" + std::to_string(n);
    return se;
}

StructuringElement StructuringElement::parse(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error("structuring element: bad spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    int n = 0;
    try {
        n = std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
        throw Error("structuring element: bad spec '" + spec + "'");
    }
    if (kind == "square") return square(n);
    if (kind == "cross") return cross(n);
    throw Error("structuring element: bad spec '" + spec + "'");
}

StructuringElement StructuringElement::reflected() const {
    std::vector<std::pair<int, int>> offs;
    offs.reserve(offsets_.size());
    for (auto [dy, dx] : offsets_) offs.emplace_back(-dy, -dx);
    StructuringElement se(std::move(offs));
    se.spec_ = spec_;
    return se;
}

}  // namespace shadowroad
