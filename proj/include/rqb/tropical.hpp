#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rqb {

// The four-element stabilization semiring used by the limitedness decider:
//   0  a costless run exists
//   1  only costly (but boundedly many) runs
//   w  cost grows without bound under iteration
//   oo no run at all
// Ordered 0 < 1 < w < oo; addition is min; composition saturates at 1 and
// is absorbed by w (unless oo is involved).
enum class Trop : std::uint8_t { Zero = 0, One = 1, Omega = 2, Inf = 3 };

inline Trop trop_min(Trop a, Trop b) { return a < b ? a : b; }

inline Trop trop_mul(Trop a, Trop b) {
    if (a == Trop::Inf || b == Trop::Inf) return Trop::Inf;
    if (a == Trop::Omega || b == Trop::Omega) return Trop::Omega;
    if (a == Trop::One || b == Trop::One) return Trop::One;
    return Trop::Zero;
}

// stabilization s(.) applied to diagonal entries of idempotents
inline Trop trop_stab(Trop a) {
    switch (a) {
        case Trop::Zero: return Trop::Zero;
        case Trop::One: return Trop::Omega;
        case Trop::Omega: return Trop::Omega;
        case Trop::Inf: return Trop::Inf;
    }
    return Trop::Inf;
}

inline char trop_char(Trop a) {
    switch (a) {
        case Trop::Zero: return '0';
        case Trop::One: return '1';
        case Trop::Omega: return 'w';
        case Trop::Inf: return '.';
    }
    return '?';
}

struct TropicalMatrix {
    int n = 0;
    std::vector<Trop> data;  // row-major

    TropicalMatrix() = default;
    explicit TropicalMatrix(int dim) : n(dim), data(static_cast<size_t>(dim) * dim, Trop::Inf) {}

    Trop& at(int i, int j) { return data[static_cast<size_t>(i) * n + j]; }
    Trop at(int i, int j) const { return data[static_cast<size_t>(i) * n + j]; }

    bool operator==(const TropicalMatrix&) const = default;
    bool operator<(const TropicalMatrix& o) const { return data < o.data; }

    TropicalMatrix operator*(const TropicalMatrix& o) const {
        TropicalMatrix r(n);
        for (int i = 0; i < n; i++)
            for (int k = 0; k < n; k++) {
                Trop aik = at(i, k);
                if (aik == Trop::Inf) continue;
                for (int j = 0; j < n; j++)
                    r.at(i, j) = trop_min(r.at(i, j), trop_mul(aik, o.at(k, j)));
            }
        return r;
    }

    bool idempotent() const { return *this * *this == *this; }

    // e#(i,j) = min_k e(i,k) * s(e(k,k)) * e(k,j); only meaningful on idempotents
    TropicalMatrix stabilize() const {
        TropicalMatrix r(n);
        for (int k = 0; k < n; k++) {
            Trop s = trop_stab(at(k, k));
            if (s == Trop::Inf) continue;
            for (int i = 0; i < n; i++) {
                Trop left = trop_mul(at(i, k), s);
                if (left == Trop::Inf) continue;
                for (int j = 0; j < n; j++)
                    r.at(i, j) = trop_min(r.at(i, j), trop_mul(left, at(k, j)));
            }
        }
        return r;
    }

    std::string str() const {
        std::string out;
        for (int i = 0; i < n; i++) {
            for (int j = 0; j < n; j++) out += trop_char(at(i, j));
            out += '\n';
        }
        return out;
    }
};

}  // namespace rqb
