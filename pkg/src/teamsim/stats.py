"""Nonparametric rank statistics used for run comparisons: Mann-Whitney U,
Wilcoxon signed-rank, Kruskal-Wallis H, and Spearman rank correlation.

All p-values use large-sample normal or chi-square approximations with tie
corrections; the approximate flag marks samples too small for those
approximations to be trustworthy. Degenerate inputs (all-tied samples, zero
diffs) yield an explicit degenerate result rather than an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import chdtrc


@dataclass(frozen=True)
class StatResult:
    statistic: float
    n: int
    p_value: float
    approximate: bool = False
    degenerate: bool = False


def _ranks(values: list[float]) -> list[float]:
    """Average ranks (1-based) with ties sharing their mean rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def _tie_term(values: list[float]) -> float:
    """Sum of t^3 - t over tie groups."""
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(t**3 - t for t in counts.values() if t > 1)


def _norm_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2))


def mann_whitney_u(a: list[float], b: list[float]) -> StatResult:
    """U for sample a (pairs where a > b, halves for ties), two-sided p."""
    if not a or not b:
        raise ValueError("both samples must be nonempty")
    n, m = len(a), len(b)
    combined = list(a) + list(b)
    ranks = _ranks(combined)
    rank_sum_a = sum(ranks[:n])
    u = rank_sum_a - n * (n + 1) / 2
    mean = n * m / 2
    total = n + m
    tie = _tie_term(combined)
    var = n * m / 12 * ((total + 1) - tie / (total * (total - 1)))
    degenerate = var <= 0
    if degenerate:
        p = 1.0
    else:
        z = (abs(u - mean) - 0.5) / math.sqrt(var)
        p = min(1.0, 2 * _norm_sf(max(z, 0.0)))
    return StatResult(statistic=u, n=total, p_value=p,
                      approximate=min(n, m) < 8, degenerate=degenerate)


def wilcoxon_signed_rank(diffs: list[float]) -> StatResult:
    """W = min of the signed-rank sums over nonzero diffs, two-sided p."""
    nonzero = [d for d in diffs if d != 0]
    if not nonzero:
        return StatResult(statistic=0.0, n=0, p_value=1.0,
                          approximate=True, degenerate=True)
    n = len(nonzero)
    ranks = _ranks([abs(d) for d in nonzero])
    w_pos = sum(r for r, d in zip(ranks, nonzero) if d > 0)
    w_neg = sum(r for r, d in zip(ranks, nonzero) if d < 0)
    w = min(w_pos, w_neg)
    mean = n * (n + 1) / 4
    tie = _tie_term([abs(d) for d in nonzero])
    var = n * (n + 1) * (2 * n + 1) / 24 - tie / 48
    if var <= 0:
        return StatResult(statistic=w, n=n, p_value=1.0,
                          approximate=True, degenerate=True)
    z = (abs(w - mean) - 0.5) / math.sqrt(var)
    p = min(1.0, 2 * _norm_sf(max(z, 0.0)))
    return StatResult(statistic=w, n=n, p_value=p, approximate=n < 10)


def kruskal_wallis(groups: list[list[float]]) -> StatResult:
    """H with tie correction across two or more groups, chi-square p."""
    if len(groups) < 2 or any(not g for g in groups):
        raise ValueError("need >= 2 nonempty groups")
    combined = [v for g in groups for v in g]
    total = len(combined)
    ranks = _ranks(combined)
    h = 0.0
    pos = 0
    for g in groups:
        rank_sum = sum(ranks[pos:pos + len(g)])
        h += rank_sum**2 / len(g)
        pos += len(g)
    h = 12 / (total * (total + 1)) * h - 3 * (total + 1)
    tie = _tie_term(combined)
    correction = 1 - tie / (total**3 - total)
    if correction <= 0:
        # Every value identical across all groups.
        return StatResult(statistic=0.0, n=total, p_value=1.0,
                          approximate=True, degenerate=True)
    h /= correction
    h = max(h, 0.0)
    df = len(groups) - 1
    p = float(chdtrc(df, h))
    return StatResult(statistic=h, n=total, p_value=p,
                      approximate=min(len(g) for g in groups) < 5)


def spearman_rho(x: list[float], y: list[float]) -> StatResult:
    """Rank correlation via Pearson on average ranks, normal-approximate p."""
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("sequences must have equal length >= 2")
    n = len(x)
    rx, ry = _ranks(list(x)), _ranks(list(y))
    mx = sum(rx) / n
    my = sum(ry) / n
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    if vx == 0 or vy == 0:
        return StatResult(statistic=0.0, n=n, p_value=1.0,
                          approximate=True, degenerate=True)
    rho = cov / math.sqrt(vx * vy)
    rho = max(-1.0, min(1.0, rho))
    if abs(rho) >= 1.0:
        p = 0.0
    else:
        z = abs(rho) * math.sqrt(n - 1)
        p = min(1.0, 2 * _norm_sf(z))
    return StatResult(statistic=rho, n=n, p_value=p, approximate=n < 10)
