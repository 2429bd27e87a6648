#ifndef ECAV_SPECFUN_HPP
#define ECAV_SPECFUN_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

namespace ecav::specfun {

using cd = std::complex<double>;

inline constexpr double kEulerGamma = 0.57721566490153286060651209008;

namespace detail {

// Ascending series for J_m, prefactor in log space so large orders neither
// overflow nor underflow prematurely.
inline cd j_series(int m, cd z) {
    const cd zh2 = -0.25 * z * z;
    cd term(1.0, 0.0), sum(1.0, 0.0);
    for (int k = 1; k < 400; ++k) {
        term *= zh2 / (static_cast<double>(k) * (m + k));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    const cd pref = std::exp(double(m) * std::log(0.5 * z) - std::lgamma(m + 1.0));
    return pref * sum;
}

// Miller downward recurrence: J_0..J_mmax simultaneously, normalized by
// J_0 + 2*sum_{k>=1} J_{2k} = 1 (valid for complex z).
inline std::vector<cd> j_miller(int mmax, cd z) {
    const double az = std::abs(z);
    const int base = std::max(mmax, static_cast<int>(az));
    const int start = base + 16 + static_cast<int>(2.0 * std::sqrt(double(base) + 1.0));
    std::vector<cd> out(mmax + 1, cd(0, 0));
    cd fp(0.0, 0.0), fc(1e-280, 0.0), norm(0.0, 0.0);
    for (int j = start; j >= 1; --j) {
        cd fm = (2.0 * j / z) * fc - fp;
        fp = fc;
        fc = fm;
        if (j - 1 <= mmax) out[j - 1] = fc;
        if (j <= mmax) out[j] = fp;
        if (((j - 1) & 1) == 0) norm += (j == 1 ? fc : 2.0 * fc);
        if (std::abs(fc.real()) > 1e250 || std::abs(fc.imag()) > 1e250) {
            const double sc = 1e-250;
            fc *= sc;
            fp *= sc;
            norm *= sc;
            for (auto& v : out) v *= sc;
        }
    }
    if (norm == cd(0.0, 0.0)) throw std::runtime_error("bessel_j: Miller normalization failed");
    for (auto& v : out) v /= norm;
    return out;
}

// Hankel asymptotic P/Q sums for order m at large |z|.
inline void asym_pq(int m, cd z, cd& P, cd& Q) {
    const double mu = 4.0 * m * m;
    const cd iz8 = 1.0 / (8.0 * z);
    cd term(1.0, 0.0);
    P = cd(1.0, 0.0);
    Q = cd(0.0, 0.0);
    double last = std::numeric_limits<double>::max();
    for (int k = 1; k <= 24; ++k) {
        const double num = mu - double(2 * k - 1) * double(2 * k - 1);
        term *= num / double(k) * iz8;
        const double mag = std::abs(term);
        if (mag > last) break;  // semiconvergent: stop at smallest term
        last = mag;
        if (k & 1)
            Q += (((k - 1) / 2) % 2 == 0 ? term : -term);
        else
            P += ((k / 2) % 2 == 0 ? term : -term);
        if (mag < 1e-18) break;
    }
}

inline void jy_asym(int m, cd z, cd& j, cd& y) {
    cd P, Q;
    asym_pq(m, z, P, Q);
    const cd omega = z - (2.0 * m + 1.0) * M_PI / 4.0;
    const cd amp = std::sqrt(2.0 / (M_PI * z));
    j = amp * (P * std::cos(omega) - Q * std::sin(omega));
    y = amp * (P * std::sin(omega) + Q * std::cos(omega));
}

inline cd y0_series(cd z, cd j0) {
    const cd zh2 = -0.25 * z * z;
    cd term(1.0, 0.0), sum(0.0, 0.0);
    double hk = 0.0;
    for (int k = 1; k < 400; ++k) {
        term *= zh2 / (double(k) * double(k));
        hk += 1.0 / k;
        const cd add = -term * hk;  // (-1)^{k+1} H_k (z^2/4)^k/(k!)^2,  term carries (-1)^k
        sum += add;
        if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
    }
    return (2.0 / M_PI) * ((std::log(0.5 * z) + kEulerGamma) * j0 + sum);
}

inline cd y1_series(cd z, cd j1) {
    // A&S 9.1.11 with n = 1
    const cd zh2 = -0.25 * z * z;
    cd term = 0.5 * z;  // (z/2)^{2k+1}/(k!(k+1)!) at k=0
    cd sum(0.0, 0.0);
    double psum = 1.0 - 2.0 * kEulerGamma;  // psi(1)+psi(2)
    for (int k = 0; k < 400; ++k) {
        const cd add = term * psum;
        sum += add;
        if (k > 2 && std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
        term *= zh2 / (double(k + 1) * double(k + 2));
        psum += 1.0 / (k + 1) + 1.0 / (k + 2);
    }
    return (2.0 / M_PI) * std::log(0.5 * z) * j1 - (2.0 / M_PI) / z - sum / M_PI;
}

}  // namespace detail

/// J_0, J_1, Y_0, Y_1 at one complex argument; the hot path of the
/// boundary-integral kernels.
inline void cyl01(cd z, cd& j0, cd& j1, cd& y0, cd& y1) {
    if (z == cd(0.0, 0.0)) throw std::domain_error("cyl01: z = 0");
    if (std::abs(z) <= 12.0) {
        j0 = detail::j_series(0, z);
        j1 = detail::j_series(1, z);
        y0 = detail::y0_series(z, j0);
        y1 = detail::y1_series(z, j1);
    } else {
        detail::jy_asym(0, z, j0, y0);
        detail::jy_asym(1, z, j1, y1);
    }
}

inline cd bessel_j(int m, cd z) {
    if (m < 0) {
        const cd v = bessel_j(-m, z);
        return ((-m) & 1) ? -v : v;
    }
    if (z == cd(0.0, 0.0)) return m == 0 ? cd(1.0, 0.0) : cd(0.0, 0.0);
    const double az = std::abs(z);
    if (az > 1e4 || m > 200)
        throw std::domain_error("bessel_j: argument/order outside supported range");
    if (az <= 12.0 || m > 1.25 * az + 10.0) return detail::j_series(m, z);
    return detail::j_miller(m, z)[m];
}

inline cd bessel_y(int m, cd z) {
    if (z == cd(0.0, 0.0)) throw std::domain_error("bessel_y: z = 0");
    const int ma = std::abs(m);
    cd j0, j1, y0, y1;
    cyl01(z, j0, j1, y0, y1);
    cd ym;
    if (ma == 0)
        ym = y0;
    else if (ma == 1)
        ym = y1;
    else {
        // upward recurrence, stable in the growing direction
        cd prev = y0, cur = y1;
        for (int k = 1; k < ma; ++k) {
            cd next = (2.0 * k / z) * cur - prev;
            prev = cur;
            cur = next;
        }
        ym = cur;
        if (!std::isfinite(ym.real()) || !std::isfinite(ym.imag()))
            throw std::runtime_error("bessel_y: overflow in recurrence");
    }
    return (m < 0 && (ma & 1)) ? -ym : ym;
}

inline cd hankel1(int m, cd z) {
    return bessel_j(m, z) + cd(0.0, 1.0) * bessel_y(m, z);
}

inline cd bessel_j_prime(int m, cd z) {
    return 0.5 * (bessel_j(m - 1, z) - bessel_j(m + 1, z));
}

inline cd hankel1_prime(int m, cd z) {
    return 0.5 * (hankel1(m - 1, z) - hankel1(m + 1, z));
}

/// ell-th positive zero of J_m (m <= 50, ell <= 20), located by scanning
/// for sign changes and bisecting.
inline double bessel_zero(int m, int ell) {
    if (m < 0 || m > 50 || ell < 1 || ell > 20)
        throw std::domain_error("bessel_zero: order/index outside supported range");
    auto jm = [m](double x) { return bessel_j(m, cd(x, 0.0)).real(); };
    double x = m + 1e-3;
    double fx = jm(x);
    const double step = 0.2;
    int found = 0;
    for (int it = 0; it < 4000; ++it) {
        const double x2 = x + step;
        const double f2 = jm(x2);
        if ((fx < 0.0) != (f2 < 0.0)) {
            ++found;
            if (found == ell) {
                double lo = x, hi = x2, flo = fx;
                for (int b = 0; b < 200; ++b) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = jm(mid);
                    if ((flo < 0.0) != (fm < 0.0))
                        hi = mid;
                    else {
                        lo = mid;
                        flo = fm;
                    }
                    if (hi - lo < 1e-13) break;
                }
                return 0.5 * (lo + hi);
            }
        }
        x = x2;
        fx = f2;
    }
    throw std::runtime_error("bessel_zero: bracket search failed");
}

}  // namespace ecav::specfun

#endif
