"""Compiled SGD loops for the recurrent and feed-forward predictors.

These mirror the numpy implementations in ``rnn`` and ``baselines`` step for
step; the test-suite checks that both engines agree.
"""
import math

import numpy as np
from numba import njit


@njit(cache=True)
def _sig(z):
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


@njit(cache=True)
def elman_sgd(X, Y, W1, W2, W3, B1, B2, lr, epochs):
    """In-place per-sample SGD. X (n, k, d), Y (n,), W3 (H,), B2 (1,)."""
    n, k, d = X.shape
    H = W2.shape[0]
    hs = np.zeros((k + 1, H))  # row 0 is the zero initial state
    xw = np.zeros((k, H))
    deltas = np.zeros((k, H))
    dh = np.zeros(H)
    dh_next = np.zeros(H)
    for _ in range(epochs):
        for s in range(n):
            for t in range(k):
                for j in range(H):
                    acc = B1[j]
                    for i in range(d):
                        acc += X[s, t, i] * W1[i, j]
                    xw[t, j] = acc
            for t in range(k):
                for j in range(H):
                    acc = xw[t, j]
                    for i in range(H):
                        acc += hs[t, i] * W2[i, j]
                    hs[t + 1, j] = _sig(acc)
            z = B2[0]
            for j in range(H):
                z += hs[k, j] * W3[j]
            pred = _sig(z)
            d_out = (pred - Y[s]) * pred * (1.0 - pred)
            for j in range(H):
                dh[j] = W3[j] * d_out
            for t in range(k - 1, -1, -1):
                for j in range(H):
                    h = hs[t + 1, j]
                    deltas[t, j] = dh[j] * h * (1.0 - h)
                for i in range(H):
                    acc = 0.0
                    for j in range(H):
                        acc += W2[i, j] * deltas[t, j]
                    dh_next[i] = acc
                for i in range(H):
                    dh[i] = dh_next[i]
            for j in range(H):
                W3[j] -= lr * d_out * hs[k, j]
            B2[0] -= lr * d_out
            for i in range(d):
                for j in range(H):
                    g = 0.0
                    for t in range(k):
                        g += X[s, t, i] * deltas[t, j]
                    W1[i, j] -= lr * g
            for j in range(H):
                g = 0.0
                for t in range(k):
                    g += deltas[t, j]
                B1[j] -= lr * g
            for i in range(H):
                for j in range(H):
                    g = 0.0
                    for t in range(1, k):
                        g += hs[t, i] * deltas[t, j]
                    W2[i, j] -= lr * g


@njit(cache=True)
def mlp_sgd(X, Y, W1, b1, w2, b2, lr, epochs):
    """In-place per-sample SGD for a one-hidden-layer sigmoid network. X (n, p)."""
    n, p = X.shape
    H = W1.shape[1]
    h = np.zeros(H)
    for _ in range(epochs):
        for s in range(n):
            for j in range(H):
                acc = b1[j]
                for i in range(p):
                    acc += X[s, i] * W1[i, j]
                h[j] = _sig(acc)
            z = b2[0]
            for j in range(H):
                z += h[j] * w2[j]
            pred = _sig(z)
            d_out = (pred - Y[s]) * pred * (1.0 - pred)
            for j in range(H):
                dj = w2[j] * d_out * h[j] * (1.0 - h[j])
                w2[j] -= lr * d_out * h[j]
                b1[j] -= lr * dj
                for i in range(p):
                    W1[i, j] -= lr * dj * X[s, i]
            b2[0] -= lr * d_out


@njit(cache=True)
def svm_sgd(X, Y, w, b, lr, lam, epochs):
    """In-place hinge-loss SGD with L2 shrinkage. Y in {-1, +1}, b (1,)."""
    n, p = X.shape
    for _ in range(epochs):
        for s in range(n):
            z = b[0]
            for i in range(p):
                z += w[i] * X[s, i]
            active = Y[s] * z < 1.0
            for i in range(p):
                g = lam * w[i]
                if active:
                    g -= Y[s] * X[s, i]
                w[i] -= lr * g
            if active:
                b[0] += lr * Y[s]
