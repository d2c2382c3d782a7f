#include "gnm/rng.hpp"

#include <sstream>

#include "gnm/errors.hpp"

namespace gnm {

Vector Rng::normals(Index n)
{
    std::normal_distribution<double> normal;
    Vector out(n);
    for (Index i = 0; i < n; ++i)
        out(i) = normal(engine_);
    return out;
}

double Rng::uniform()
{
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
}

double Rng::uniform(double lo, double hi)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    double u = dist(engine_);
    while (u <= lo)
        u = dist(engine_);
    return u;
}

std::vector<std::string> Rng::state() const
{
    std::ostringstream os;
    os << engine_;
    std::istringstream is(os.str());
    std::vector<std::string> words;
    for (std::string w; is >> w;)
        words.push_back(w);
    return words;
}

void Rng::set_state(const std::vector<std::string>& words)
{
    std::string joined;
    for (const auto& w : words) {
        if (w.empty() || w.find_first_not_of("0123456789") != std::string::npos)
            throw InvalidArgument("generator state word is not an unsigned integer: '" + w + "'");
        joined += w;
        joined += ' ';
    }
    std::istringstream is(joined);
    std::mt19937_64 engine;
    is >> engine;
    if (is.fail())
        throw InvalidArgument("generator state is malformed");
    std::string rest;
    if (is >> rest)
        throw InvalidArgument("generator state has trailing words");
    engine_ = engine;
}

} // namespace gnm
