"""Small summary statistics used by the experiment harness."""

import math


def mean(values) -> float:
    values = list(values)
    return sum(values) / len(values)


def sample_std(values) -> float:
    """Standard deviation with the n-1 denominator; 0.0 for fewer than 2 samples."""
    values = list(values)
    n = len(values)
    if n < 2:
        return 0.0
    m = mean(values)
    return math.sqrt(sum((v - m) ** 2 for v in values) / (n - 1))


def _ranks(values) -> list[float]:
    """Average ranks (1-based), ties share the mean of their positions."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(xs, ys) -> float:
    """Spearman rank correlation (Pearson correlation of average ranks).

    Returns 0.0 when either side is constant (correlation undefined).
    """
    xs = list(xs)
    ys = list(ys)
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("spearman needs two equal-length sequences of length >= 2")
    rx = _ranks(xs)
    ry = _ranks(ys)
    mx = mean(rx)
    my = mean(ry)
    sxy = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    sxx = sum((a - mx) ** 2 for a in rx)
    syy = sum((b - my) ** 2 for b in ry)
    if sxx == 0.0 or syy == 0.0:
        return 0.0
    return sxy / math.sqrt(sxx * syy)
