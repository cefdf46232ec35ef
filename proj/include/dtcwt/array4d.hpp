#ifndef DTCWT_ARRAY4D_HPP
#define DTCWT_ARRAY4D_HPP

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace dtcwt {

using Shape4 = std::array<int, 4>;

inline long long element_count(const Shape4& s) {
    return 1LL * s[0] * s[1] * s[2] * s[3];
}

inline std::string shape_str(const Shape4& s) {
    return "(" + std::to_string(s[0]) + "," + std::to_string(s[1]) + "," +
           std::to_string(s[2]) + "," + std::to_string(s[3]) + ")";
}

/// Dense 4D array, x fastest: index = x + nx*(y + ny*(z + nz*t)).
template <typename T>
class Array4D {
public:
    Array4D() : shape_{0, 0, 0, 0} {}
    explicit Array4D(const Shape4& s, T init = T{})
        : shape_(s), data_(static_cast<size_t>(element_count(s)), init) {
        for (int d = 0; d < 4; ++d)
            if (s[d] <= 0) throw std::invalid_argument("Array4D: nonpositive extent " + shape_str(s));
    }

    const Shape4& shape() const { return shape_; }
    int extent(int d) const { return shape_[d]; }
    size_t size() const { return data_.size(); }
    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }
    std::vector<T>& vec() { return data_; }
    const std::vector<T>& vec() const { return data_; }

    T& at(int x, int y, int z, int t) {
        return data_[idx(x, y, z, t)];
    }
    const T& at(int x, int y, int z, int t) const {
        return data_[idx(x, y, z, t)];
    }
    size_t idx(int x, int y, int z, int t) const {
        return static_cast<size_t>(x) +
               static_cast<size_t>(shape_[0]) *
                   (static_cast<size_t>(y) +
                    static_cast<size_t>(shape_[1]) *
                        (static_cast<size_t>(z) + static_cast<size_t>(shape_[2]) * static_cast<size_t>(t)));
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    Array4D<T>& operator+=(const Array4D<T>& o) {
        check_same_shape(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Array4D<T>& operator-=(const Array4D<T>& o) {
        check_same_shape(o);
        for (size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Array4D<T>& operator*=(T s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    void check_same_shape(const Array4D<T>& o) const {
        if (shape_ != o.shape_)
            throw std::invalid_argument("shape mismatch: " + shape_str(shape_) + " vs " + shape_str(o.shape_));
    }

private:
    Shape4 shape_;
    std::vector<T> data_;
};

using Volume4D = Array4D<double>;
using ComplexArray4D = Array4D<std::complex<double>>;

inline double norm2(const Volume4D& v) {
    double s = 0;
    for (double x : v.vec()) s += x * x;
    return std::sqrt(s);
}

inline double dot(const Volume4D& a, const Volume4D& b) {
    a.check_same_shape(b);
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += a.data()[i] * b.data()[i];
    return s;
}

/// Even extents and finite samples; the transforms require both.
void validate_volume(const Volume4D& v);

/// Deterministic partition of [0,n) over worker threads; each index is
/// processed exactly once so results never depend on the schedule.
void parallel_for(long long n, int threads, const std::function<void(long long)>& fn);

/// Global worker count used by the library (set from the CLI --threads flag).
int worker_threads();
void set_worker_threads(int n);

/// Deterministic Gaussian sampler (Box-Muller over mt19937_64); used instead
/// of std::normal_distribution so streams are identical across platforms.
class GaussianSampler {
public:
    explicit GaussianSampler(unsigned long long seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    double operator()();

private:
    double next_uniform();  // in (0,1)
    unsigned long long state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace dtcwt

#endif
