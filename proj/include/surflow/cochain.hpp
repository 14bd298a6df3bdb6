#pragma once

#include <surflow/types.hpp>

#include <string>
#include <utility>

namespace surflow {

/// Real values on the oriented k-cells of a mesh (k = 0, 1, 2).
///
/// 0-cochains hold point values, 1-cochains line integrals over canonically
/// oriented edges, 2-cochains integrals over triangles.
class Cochain {
public:
    Cochain() = default;
    Cochain(int degree, Vector values) : degree_(degree), values_(std::move(values))
    {
        if (degree < 0 || degree > 2) throw ContractError("cochain degree must be 0, 1 or 2");
    }

    static Cochain zeros(int degree, Index size) { return {degree, Vector::Zero(size)}; }

    int degree() const { return degree_; }
    Index size() const { return values_.size(); }
    const Vector& values() const { return values_; }
    Vector& values() { return values_; }

    Cochain& operator+=(const Cochain& other)
    {
        require_same(other, "+");
        values_ += other.values_;
        return *this;
    }
    Cochain& operator-=(const Cochain& other)
    {
        require_same(other, "-");
        values_ -= other.values_;
        return *this;
    }
    Cochain& operator*=(double s)
    {
        values_ *= s;
        return *this;
    }

    friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
    friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
    friend Cochain operator*(double s, Cochain a) { return a *= s; }
    friend Cochain operator*(Cochain a, double s) { return a *= s; }
    friend Cochain operator-(Cochain a) { return a *= -1.0; }

private:
    void require_same(const Cochain& other, const char* op) const
    {
        if (degree_ != other.degree_ || size() != other.size()) {
            throw ContractError(std::string("cochain mismatch in operator ") + op);
        }
    }

    int degree_ = 0;
    Vector values_;
};

} // namespace surflow
