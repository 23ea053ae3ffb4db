import math
from dataclasses import dataclass
from enum import IntEnum

import numba as nb
import numpy as np
from scipy.special import betaln


class Alternative(IntEnum):
    """Alternative hypothesis of a one-sided two-sample test."""
    A_GREATER = 1  # mean of `a` greater than mean of `b`
    A_LESS = 2  # mean of `a` less than mean of `b`


@dataclass(frozen=True)
class WelchResult(object):
    """Outcome of one Welch's t-test.

    Attributes
    ----------
    t           : `float`
                  t statistic `(mean_a - mean_b)/sqrt(var_a/n_a + var_b/n_b)`.
    df          : `float`
                  Welch-Satterthwaite degrees of freedom.
    p_one_sided : `float`
                  one-sided p-value under `alternative`.
    """
    t: float
    df: float
    p_one_sided: float
    mean_a: float
    mean_b: float
    var_a: float
    var_b: float
    n_a: int
    n_b: int
    alternative: Alternative = Alternative.A_GREATER

    def as_dict(self):
        return {'t': self.t, 'df': self.df, 'p_one_sided': self.p_one_sided,
                'mean_a': self.mean_a, 'mean_b': self.mean_b, 'var_a': self.var_a, 'var_b': self.var_b,
                'n_a': self.n_a, 'n_b': self.n_b, 'alternative': self.alternative.name}


@nb.jit(nopython=True)
def _beta_continued_fraction(a, b, x):
    # modified Lentz's method
    tiny, eps = 1e-300, 1e-16
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c, d = 1.0, 1.0 - qab*x/qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0/d
    h = d
    for m in range(1, 10001):
        m2 = 2*m
        aa = m*(b - m)*x/((qam + m2)*(a + m2))
        d = 1.0 + aa*d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa/c
        if abs(c) < tiny:
            c = tiny
        d = 1.0/d
        h *= d*c
        aa = -(a + m)*(qab + m)*x/((a + m2)*(qap + m2))
        d = 1.0 + aa*d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa/c
        if abs(c) < tiny:
            c = tiny
        d = 1.0/d
        delta = d*c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def regularized_incomplete_beta(a, b, x):
    """Regularized incomplete beta function `I_x(a, b)` for `a, b > 0` and `x` in `[0, 1]`.

    The continued fraction converges fast for `x < (a + 1)/(a + b + 2)`; otherwise the symmetry
    `I_x(a, b) = 1 - I_{1-x}(b, a)` is used.
    """
    assert a > 0.0 and b > 0.0, f'a (== {a}) and b (== {b}) should > 0.'
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = a*math.log(x) + b*math.log1p(-x) - betaln(a, b)
    if x < (a + 1.0)/(a + b + 2.0):
        return math.exp(log_front)*_beta_continued_fraction(a, b, x)/a
    return 1.0 - math.exp(log_front)*_beta_continued_fraction(b, a, 1.0 - x)/b


def student_t_upper_tail(t, df):
    """Upper tail `P(T >= t)` of Student's t distribution with `df` degrees of freedom.

    Infinite `t` gives the limits 0 (`+inf`) and 1 (`-inf`).
    """
    if math.isnan(t) or not math.isfinite(df):
        raise ValueError(f'both t (== {t}) and df (== {df}) should be numbers and df finite.')
    if df <= 0.0:
        raise ValueError(f'df (== {df}) should > 0.')
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    tail = 0.5*regularized_incomplete_beta(df/2.0, 0.5, df/(df + t*t))
    return tail if t > 0.0 else 1.0 - tail


def welch_one_sided(a, b, alternative=Alternative.A_GREATER):
    """One-sided Welch's t-test of the means of two independent samples with unequal variances.

    Parameters
    ----------
    a, b        : `array_like`
                  samples with at least 2 values each.
    alternative : `Alternative`
                  `A_GREATER` tests `mean(a) > mean(b)`, `A_LESS` tests `mean(a) < mean(b)`.

    Returns
    -------
    a `WelchResult`. When both sample variances are zero, `t` is 0 (equal means, p-value 0.5) or infinite
    (different means) and `df` falls back to `n_a + n_b - 2`.

    References
    ----------
    Welch, B.L., 1947.
    The generalization of 'Student's' problem when several different population variances are involved.
    Biometrika, 34(1/2), pp.28-35.
    """
    a, b = np.asarray(a, dtype=np.float64).ravel(), np.asarray(b, dtype=np.float64).ravel()
    alternative = Alternative(alternative)
    if a.size < 2 or b.size < 2:
        raise ValueError(f'both samples need at least 2 values (got {a.size} and {b.size}).')
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError('both samples should only contain finite values.')
    n_a, n_b = a.size, b.size
    mean_a, mean_b = float(np.mean(a)), float(np.mean(b))
    var_a, var_b = float(np.var(a, ddof=1)), float(np.var(b, ddof=1))  # two-pass
    se_a, se_b = var_a/n_a, var_b/n_b
    se2 = se_a + se_b
    if se2 > 0.0:
        t = (mean_a - mean_b)/math.sqrt(se2)
        df = se2*se2/(se_a*se_a/(n_a - 1) + se_b*se_b/(n_b - 1))
    else:
        t = 0.0 if mean_a == mean_b else math.copysign(math.inf, mean_a - mean_b)
        df = float(n_a + n_b - 2)
    p = student_t_upper_tail(t if alternative == Alternative.A_GREATER else -t, df)
    return WelchResult(float(t), float(df), float(p), mean_a, mean_b, var_a, var_b, n_a, n_b, alternative)
