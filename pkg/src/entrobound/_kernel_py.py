"""Pure-numpy twin of the compiled ``_kernel`` module.

Same call signatures and the same two-pass centred covariance, so results
agree with the extension to rounding.
"""
import numpy as np


def _tilt_exponents(z, logw, u, v):
    return logw + u * z + v * z * z


def cgf_value(z, logw, u, v):
    a = _tilt_exponents(z, logw, u, v)
    amax = a.max()
    return float(amax + np.log(np.exp(a - amax).sum()))


def cgf_eval(z, logw, u, v):
    a = _tilt_exponents(z, logw, u, v)
    amax = a.max()
    e = np.exp(a - amax)
    s0 = e.sum()
    z2 = z * z
    m1 = float(e @ z / s0)
    m2 = float(e @ z2 / s0)
    d1 = z - m1
    d2 = z2 - m2
    ed1 = e * d1
    c11 = float(ed1 @ d1 / s0)
    c12 = float(ed1 @ d2 / s0)
    c22 = float((e * d2) @ d2 / s0)
    return float(amax + np.log(s0)), m1, m2, c11, c12, c22


def cgf_values_into(z, logw, us, vs, out):
    # chunked so the (points x atoms) matrix stays small
    step = max(1, 2_000_000 // max(1, z.size))
    z2 = z * z
    for start in range(0, us.size, step):
        sl = slice(start, start + step)
        a = logw[None, :] + us[sl, None] * z[None, :] + vs[sl, None] * z2[None, :]
        amax = a.max(axis=1)
        out[sl] = amax + np.log(np.exp(a - amax[:, None]).sum(axis=1))
