"""Independent reference computations used by the test-suite.

Nothing here calls into the package's numerical engines; everything is done
with plain Python loops or mpmath so that agreement is a genuine cross-check.
"""

import itertools
import math

import mpmath


def h2(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def kernel(alpha_L, alpha_H, beta, y_prev, x):
    """P(Y = B | y_prev, x) by direct reading of the binding model."""
    if y_prev == 1:
        return 1.0 - beta
    return alpha_H if x == 1 else alpha_L


def iid_rate_oracle(alpha_L, alpha_H, beta, p_H):
    """H(Y_2 | Y_1) - H(Y_2 | Y_1, X_2) at stationarity, summed by hand."""
    a_bar = p_H * alpha_H + (1 - p_H) * alpha_L
    if a_bar + beta == 0:
        return 0.0
    pi_B = a_bar / (a_bar + beta)
    pi = {0: 1 - pi_B, 1: pi_B}
    h_y = 0.0
    h_yx = 0.0
    for yp in (0, 1):
        pb = sum((p_H if x else 1 - p_H) * kernel(alpha_L, alpha_H, beta, yp, x) for x in (0, 1))
        h_y += pi[yp] * h2(pb)
        for x in (0, 1):
            h_yx += pi[yp] * (p_H if x else 1 - p_H) * h2(kernel(alpha_L, alpha_H, beta, yp, x))
    return h_y - h_yx


def joint_dict(alpha_L, alpha_H, beta, policy, y0_law, n):
    """Dict ((y0, x1, y1, ..., xn, yn) -> probability).

    ``policy(i, xs, ys)`` returns P(X_i = L | x^{i-1}, y_0^{i-1}).
    """
    out = {}
    for y0 in (0, 1):
        if y0_law[y0] == 0:
            continue
        for xs in itertools.product((0, 1), repeat=n):
            for ys in itertools.product((0, 1), repeat=n):
                p = y0_law[y0]
                hist_y = (y0,)
                for i in range(n):
                    q_l = policy(i + 1, xs[:i], hist_y)
                    p *= q_l if xs[i] == 0 else 1 - q_l
                    pb = kernel(alpha_L, alpha_H, beta, hist_y[-1], xs[i])
                    p *= pb if ys[i] == 1 else 1 - pb
                    hist_y = hist_y + (ys[i],)
                key = (y0,) + tuple(v for pair in zip(xs, ys) for v in pair)
                out[key] = out.get(key, 0.0) + p
    return out


def _entropy(counts):
    tot = sum(counts.values())
    return -sum(v * math.log2(v / tot) for v in counts.values() if v > 0)


def directed_information_oracle(joint, n):
    """sum_i H(Y_i | Y^{i-1}) - H(Y_i | X^i, Y^{i-1}), Y_0 marginalised out."""
    total = 0.0
    for i in range(1, n + 1):
        def marg(with_x, upto):
            m = {}
            for key, p in joint.items():
                xs = key[1::2][:i]
                ys = key[2::2][:upto]
                k = (xs if with_x else ()) + ys
                m[k] = m.get(k, 0.0) + p
            return m
        h_y = _entropy(marg(False, i)) - _entropy(marg(False, i - 1))
        h_yx = _entropy(marg(True, i)) - _entropy(marg(True, i - 1))
        total += h_y - h_yx
    return total


def kabanov_mp(c, dps=50):
    with mpmath.workdps(dps):
        c = mpmath.mpf(c)
        return (c + 1) ** (1 + 1 / c) / mpmath.e - (1 + 1 / c) * mpmath.log(1 + c)
