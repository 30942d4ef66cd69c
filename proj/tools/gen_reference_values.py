#!/usr/bin/env python3
"""Generate high-precision reference values for the test suite.

Every constant in tests/reference_values.hpp is produced here with 50-digit
arithmetic (mpmath) from first principles, independently of the C++
implementation.  Rerun and diff when touching the derived-constant formulas.
"""
import mpmath as mp

mp.mp.dps = 50


def pS(N):
    return mp.mpf(N + 2) / (N - 2) if N > 2 else mp.inf


def pStar(N):
    return mp.mpf(N) * (N + 2) / (N - 1) ** 2 if N > 2 else mp.inf


def pJL(N):
    if N <= 10:
        return mp.inf
    return 1 + 4 * (N - 4 + 2 * mp.sqrt(N - 1)) / ((N - 2) * (N - 10))


def pL(N):
    if N <= 10:
        return mp.inf
    return 1 + mp.mpf(6) / (N - 10)


def pH(N):
    return 1 + 4 * (N + 2 * mp.sqrt(N) - 4) / (N * N - 12 * N + 16)


def kappa(p):
    return (p - 1) ** (mp.mpf(-1) / (p - 1))


def Lconst(N, p):
    return (2 * ((N - 2) * p - N) / (p - 1) ** 2) ** (mp.mpf(1) / (p - 1))


def beta(N, p):
    L = Lconst(N, p)
    disc = (N - 2) ** 2 - 4 * p * L ** (p - 1)
    return (-(N - 2) + mp.sqrt(disc)) / 2


def mu(N, p, j):
    return -(beta(N, p) / 2 + 1 / mp.mpf(p - 1) + j)


def xi(p):
    return mp.mpf(p + 1) / (p - 1)


def f_ratio(N, p):
    x = xi(p)
    return mp.gamma(N / mp.mpf(2) - x) / mp.gamma(N / mp.mpf(2)) * ((N - (1 + x)) / 2) ** x


def E_kappa(N, p):
    k = kappa(p)
    return (p - 1) / (2 * mp.mpf(p + 1)) * k ** (p + 1) * 2 ** (N - 1) * mp.gamma(N / mp.mpf(2))


def E_singular(N, p):
    x = xi(p)
    L = Lconst(N, p)
    return (mp.mpf(1) / 2 - 1 / mp.mpf(p + 1)) * L ** (p + 1) * 2 ** (N - 2 * x - 1) * mp.gamma(N / mp.mpf(2) - x)


def c_hat(N, p, j):
    b = beta(N, p) + N / mp.mpf(2)
    norm2 = 2 ** (2 * beta(N, p) + N - 1) * mp.gamma(b) ** 2 * mp.factorial(j) / mp.gamma(b + j)
    return 1 / mp.sqrt(norm2)


def emit(name, value, digits=25):
    print(f"inline constexpr double {name} = {mp.nstr(value, digits)};")


print("// Auto-generated by tools/gen_reference_values.py -- do not edit by hand.")
print("// All values: 50-digit arithmetic, printed to 25 significant digits.")
print("#pragma once")
print()
print("namespace refvals {")
emit("kPS12", pS(12))
emit("kPJL12", pJL(12))
emit("kPL12", pL(12))
emit("kPH12", pH(12))
emit("kPStar12", pStar(12))
emit("kPStar3", pStar(3))
emit("kPS6", pS(6))
emit("kPJL13", pJL(13))
emit("kPL13", pL(13))
emit("kKappaP5", kappa(5))
emit("kKappaP3", kappa(3))
emit("kL_N12P3", Lconst(12, 3))
emit("kL_N12P5", Lconst(12, 5))
emit("kL_N6P5", Lconst(6, 5))
emit("kBeta_N12P5", beta(12, 5))
emit("kMu0_N12P5", mu(12, 5, 0))
emit("kMu1_N12P5", mu(12, 5, 1))
emit("kMu2_N12P5", mu(12, 5, 2))
emit("kMu2_N12P4", mu(12, 4, 2))
emit("kGammaHalf", mp.gamma(mp.mpf("0.5")))
emit("kGamma6", mp.gamma(6))
emit("kGamma45", mp.gamma(mp.mpf("4.5")))
emit("kDigamma1", mp.digamma(1))
emit("kDigamma2", mp.digamma(2))
emit("kDigamma37", mp.digamma(mp.mpf("3.7")))
emit("kKummerM2b2z1", mp.mpf(1) / 6)
emit("kF_N12P5", f_ratio(12, 5))
emit("kF_N12P50", f_ratio(12, 50))
emit("kEkappa_N12P5", E_kappa(12, 5))
emit("kEsing_N12P5", E_singular(12, 5))
emit("kEkappa_N6P5", E_kappa(6, 5))
emit("kEsing_N6P5", E_singular(6, 5))
emit("kChat0_N12P5", c_hat(12, 5, 0))
emit("kChat1_N12P5", c_hat(12, 5, 1))
emit("kChat2_N12P5", c_hat(12, 5, 2))
emit("kKappaPhiInfCross_N12P5", (Lconst(12, 5) / kappa(5)) ** 2)
emit("kScalingExp_N12P5", 1 + beta(12, 5) * (5 - 1) / 2)
emit("kXi_N12P5", xi(5))
# weight moments 2^(N+2m-1) Gamma((N+2m)/2), N = 12
for m in range(4):
    emit(f"kWeightMoment_N12_m{m}", 2 ** (12 + 2 * m - 1) * mp.gamma((12 + 2 * m) / mp.mpf(2)))
print("}  // namespace refvals")
