# Copyright 2026 The qht Authors
# SPDX-License-Identifier: Apache-2.0
"""Independent reference values frozen into the unit tests.

Pure mpmath / numpy; shares no code with the library. Run: python3 generate.py
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 60


def psi(n, x):
    x = mp.mpf(x)
    return mp.hermite(n, x) * mp.exp(-x * x / 2) / mp.sqrt(2**n * mp.factorial(n) * mp.sqrt(mp.pi))


def he_norm(k, x):
    # probabilist Hermite He_k(x) / sqrt(k!), He_k(x) = 2^{-k/2} H_k(x / sqrt 2)
    x = mp.mpf(x)
    return mp.hermite(k, x / mp.sqrt(2)) * mp.power(2, -mp.mpf(k) / 2) / mp.sqrt(mp.factorial(k))


def centered_dft(M):
    j = np.arange(-M // 2, M // 2)
    return np.exp(2j * np.pi * np.outer(j, j) / M) / np.sqrt(M)


def grid(M):
    return np.arange(-M // 2, M // 2) * np.sqrt(2 * np.pi / M)


def dense_h(M):
    x = grid(M)
    F = centered_dft(M)
    X2 = np.diag(x**2)
    P2 = np.linalg.inv(F) @ X2 @ F
    return 0.5 * (X2 + P2), X2, P2


def expm_herm(A, c):
    w, V = np.linalg.eigh(A)
    return V @ np.diag(np.exp(-1j * c * w)) @ V.conj().T


def ff_error(M, N, t):
    H, X2, P2 = dense_h(M)
    w, V = np.linalg.eigh(H)
    U = V @ np.diag(np.exp(-1j * w * t)) @ V.conj().T
    k = np.floor((t + np.pi) / (2 * np.pi))
    r = t - 2 * np.pi * k
    phase = (-1) ** int(k)
    if abs(r) <= np.pi / 2:
        a, b = np.tan(r / 2) / 2, np.sin(r) / 2
        W = expm_herm(P2, a) @ expm_herm(X2, b) @ expm_herm(P2, a)
    else:
        a, b = np.tan(r / 4) / 2, np.sin(r / 2) / 2
        W = expm_herm(P2, a) @ expm_herm(X2, b) @ expm_herm(P2, 2 * a) @ expm_herm(X2, b) @ expm_herm(P2, a)
    W = phase * W
    Q = V[:, :N]
    return np.linalg.norm(Q.conj().T @ (U - W) @ Q, 2)


def schedule(delta, eps):
    L = int(mp.ceil(mp.log(2 / mp.mpf(eps)) / delta))
    if L % 2 == 0:
        L += 1
    gamma = 1 / mp.cosh(mp.acosh(1 / mp.mpf(eps)) / L)
    alpha1 = 2 * mp.acot(mp.tan(2 * mp.pi / L) * mp.sqrt(1 - gamma**2))
    return L, gamma, alpha1


def sgn_coeff(k):
    f = lambda x: he_norm(k, x) * mp.exp(-x * x / 2) / mp.sqrt(2 * mp.pi)
    return 2 * mp.quad(f, [0, mp.inf]) if k % 2 else mp.mpf(0)


def commutator_tail(M, N, t_max, family, t_start=3):
    with mp.workdps(80):
        h = mp.sqrt(2 * mp.pi / M)
        labels = list(range(-M // 2, M // 2))
        x = [j * h for j in labels]
        F = mp.matrix(M, M)
        for a, j in enumerate(labels):
            for b, k in enumerate(labels):
                F[a, b] = mp.expjpi(mp.mpf(2 * j * k) / M) / mp.sqrt(M)
        Finv = F.H
        X = mp.diag(x)
        X2 = X * X
        P = Finv * X * F
        P2 = Finv * X2 * F
        if family == "x2_p2":
            A, B = X2, P2
        elif family == "p2_x2":
            A, B = P2, X2
        else:
            A, B = P2, X * P + P * X
        S = mp.matrix(M, M)
        C = B
        for t in range(1, t_max + 1):
            C = A * C - C * A
            if t >= t_start:
                S += C / mp.factorial(t)
        Psi = mp.matrix(M, N)
        for n in range(N):
            for a in range(M):
                Psi[a, n] = mp.power(2 * mp.pi / M, mp.mpf(1) / 4) * psi(n, x[a])
        G = Psi.T * Psi
        L = mp.cholesky(G)
        Q = Psi * mp.inverse(L).T
        K = Q.T * S * Q
        ev = mp.eighe(K.H * K)[0]
        return mp.sqrt(max(abs(e) for e in ev))


def window(n, x):
    xm = mp.sqrt(mp.mpf(3) / 4 * (2 * n + 1))
    d = 1 / (20 * mp.sqrt(2 * n + 1))
    ax = abs(mp.mpf(x))
    if ax <= xm:
        return mp.mpf(1)
    if ax >= xm + 2 * d:
        return mp.mpf(0)
    bump = lambda u: mp.exp(-1 / (1 - u * u))
    hi = min(mp.mpf(1), (xm + d - ax) / d)
    return mp.quad(bump, [-1, hi]) / mp.quad(bump, [-1, 1])


def pr_overlap(n, M):
    with mp.workdps(30):
        h = mp.sqrt(2 * mp.pi / M)
        J = int(mp.ceil(mp.sqrt(mp.mpf(3) / 4 * (2 * n + 1) * M / (2 * mp.pi))))
        acc = mp.mpf(0)
        for j in range(-J, J):
            x = j * h
            g = window(n, x)
            if g == 0:
                continue
            if n == 0:
                v = mp.mpf(3) / 4 * g
            else:
                s = mp.sqrt(2 * n + 1)
                phi = mp.acos(max(-1, min(1, x / s)))
                amp = g / mp.sqrt(mp.sin(phi)) * mp.power(2, mp.mpf(1) / 4) / (mp.sqrt(mp.pi) * mp.power(n, mp.mpf(1) / 4))
                theta = (mp.mpf(n) / 2 + mp.mpf(1) / 4) * (mp.sin(2 * phi) - 2 * phi) + 3 * mp.pi / 4
                v = amp * mp.sin(theta)
            acc += psi(n, x) * v
        return acc * h


if __name__ == "__main__":
    print("# psi_n(x)")
    for n, x in [(0, 0.0), (1, 0.5), (5, 1.3), (10, -2.2), (30, 4.0), (60, -9.5)]:
        print(n, x, mp.nstr(psi(n, x), 17))
    print("# He_k(x)/sqrt(k!)")
    for k, x in [(3, 0.7), (6, -1.1), (9, 2.5)]:
        print(k, x, mp.nstr(he_norm(k, x), 17))
    print("# discrete QHO energies, M=32")
    w = np.linalg.eigvalsh(dense_h(32)[0])
    print([repr(w[i]) for i in (0, 1, 5, 10, 31)])
    print("# fast-forward error ||Pi_N (U - V) Pi_N||")
    for M, N, t in [(64, 4, 0.5), (64, 4, 2.0), (64, 8, 3.0), (64, 4, 7.0)]:
        print(M, N, t, repr(ff_error(M, N, t)))
    print("# schedule")
    for d, e in [(0.3, 0.01), (0.5, 0.1)]:
        L, g, a1 = schedule(d, e)
        print(d, e, L, mp.nstr(g, 17), mp.nstr(a1, 17))
    print("# sgn coefficients")
    for k in range(1, 10):
        print(k, mp.nstr(sgn_coeff(k), 17))
    print("# commutator tails M=16")
    for fam in ["x2_p2", "p2_x2", "p2_xp_anti"]:
        for N in (1, 2):
            print(fam, N, mp.nstr(commutator_tail(16, N, 12, fam), 17))
    print("# PR overlap")
    for n, M in [(0, 4096), (3, 4096), (12, 4096)]:
        print(n, M, mp.nstr(pr_overlap(n, M), 17))
