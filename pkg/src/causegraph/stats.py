"""Hypothesis tests used to compare prediction runs and complexity groups."""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import List, Mapping, Optional, Sequence, Tuple

from .special import chi2_sf, norm_sf, t_sf_two_sided

logger = logging.getLogger(__name__)

__all__ = [
    "ItemMismatch",
    "DegenerateMargin",
    "EmptyGroup",
    "ZeroVariance",
    "StatResult",
    "mcnemar",
    "mcnemar_counts",
    "discordant_counts",
    "chi2_independence",
    "rank",
    "kruskal_wallis",
    "epsilon_squared",
    "dunn_posthoc",
    "holm",
    "bonferroni",
    "pearson",
]

EXACT_KW_LIMIT = 200_000  # max number of group assignments enumerated for an exact KW p


class ItemMismatch(ValueError):
    pass


class DegenerateMargin(ValueError):
    pass


class EmptyGroup(ValueError):
    pass


class ZeroVariance(ValueError):
    pass


@dataclass(frozen=True)
class StatResult:
    test: str
    statistic: float
    p_value: float
    effect_size: Optional[float] = None
    alpha: float = 0.05
    correction: str = "none"
    df: Optional[float] = None
    extra: dict = field(default_factory=dict)

    @property
    def significant(self) -> bool:
        return self.p_value < self.alpha

    def to_dict(self) -> dict:
        out = {
            "test": self.test,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "effect_size": self.effect_size,
            "alpha": self.alpha,
            "significant": self.significant,
            "correction": self.correction,
            "df": self.df,
        }
        out.update(self.extra)
        return out


# --- McNemar -----------------------------------------------------------------

def discordant_counts(a_correct: Mapping[str, bool], b_correct: Mapping[str, bool]) -> Tuple[int, int]:
    """(a right & b wrong, a wrong & b right) over a shared item set."""
    if set(a_correct) != set(b_correct):
        only_a = len(set(a_correct) - set(b_correct))
        only_b = len(set(b_correct) - set(a_correct))
        raise ItemMismatch(f"item sets differ ({only_a} only in first, {only_b} only in second)")
    b01 = sum(1 for k, v in a_correct.items() if v and not b_correct[k])
    b10 = sum(1 for k, v in a_correct.items() if not v and b_correct[k])
    return b01, b10


def mcnemar_counts(b01: int, b10: int, exact: bool = False, alpha: float = 0.05) -> StatResult:
    """Continuity-corrected McNemar test, or the exact binomial version."""
    if b01 < 0 or b10 < 0:
        raise ValueError("discordant counts must be nonnegative")
    n = b01 + b10
    extra = {"b01": b01, "b10": b10}
    if n == 0:
        return StatResult("mcnemar", 0.0, 1.0, alpha=alpha, df=1, extra=extra)
    if exact:
        k = min(b01, b10)
        tail = sum(math.comb(n, i) for i in range(k + 1))
        p = min(1.0, 2 * tail / 2 ** n)
        return StatResult("mcnemar-exact", float(k), p, alpha=alpha, extra=extra)
    stat = (abs(b01 - b10) - 1) ** 2 / n
    return StatResult("mcnemar", stat, chi2_sf(stat, 1), alpha=alpha, df=1, extra=extra)


def mcnemar(a, b, gold: Optional[Mapping[str, str]] = None, exact: bool = False,
            alpha: float = 0.05) -> StatResult:
    """Compare two runs. Without ``gold``, ``a`` and ``b`` are item -> correct maps;
    with it they are item -> predicted label maps scored against gold."""
    if gold is not None:
        for name, run in (("first", a), ("second", b)):
            if set(run) != set(gold):
                raise ItemMismatch(f"{name} run does not cover exactly the gold items")
        a = {k: a[k] == g for k, g in gold.items()}
        b = {k: b[k] == g for k, g in gold.items()}
    return mcnemar_counts(*discordant_counts(a, b), exact=exact, alpha=alpha)


# --- chi-squared independence -------------------------------------------------

def chi2_independence(table: Sequence[Sequence[float]], alpha: float = 0.05) -> StatResult:
    """Pearson chi-squared on an r x c contingency table, no continuity correction."""
    rows = [list(map(float, r)) for r in table]
    if len(rows) < 2 or any(len(r) != len(rows[0]) for r in rows) or len(rows[0]) < 2:
        raise ValueError("need a rectangular table with at least 2 rows and 2 columns")
    if any(v < 0 for r in rows for v in r):
        raise ValueError("counts must be nonnegative")
    rsum = [sum(r) for r in rows]
    csum = [sum(c) for c in zip(*rows)]
    total = sum(rsum)
    if any(m == 0 for m in rsum + csum):
        raise DegenerateMargin("a row or column total is zero")
    stat = 0.0
    for i, r in enumerate(rows):
        for j, obs in enumerate(r):
            exp = rsum[i] * csum[j] / total
            stat += (obs - exp) ** 2 / exp
    df = (len(rows) - 1) * (len(rows[0]) - 1)
    return StatResult("chi2", stat, chi2_sf(stat, df), alpha=alpha, df=df, extra={"n": total})


# --- rank tests ---------------------------------------------------------------

def rank(values: Sequence[float]) -> List[float]:
    """1-based ranks with ties receiving their average rank."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        mid = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = mid
        i = j + 1
    return ranks


def _tie_term(values: Sequence[float]) -> float:
    return sum(t ** 3 - t for t in Counter(values).values())


def _h_statistic(ranks: Sequence[float], sizes: Sequence[int], n: int) -> float:
    h, pos = 0.0, 0
    for size in sizes:
        r = sum(ranks[pos:pos + size])
        h += r * r / size
        pos += size
    return 12.0 / (n * (n + 1)) * h - 3 * (n + 1)


def _assignments(n: int, sizes: Sequence[int]) -> int:
    out = math.factorial(n)
    for s in sizes:
        out //= math.factorial(s)
    return out


def _exact_kw_p(ranks: Sequence[float], sizes: Sequence[int], h_obs: float) -> float:
    # enumerate every way of splitting the pooled ranks into groups of the given sizes
    n = len(ranks)
    hits = total = 0
    tol = 1e-9 * max(1.0, abs(h_obs))

    def split(remaining: Tuple[int, ...], k: int, acc: float):
        nonlocal hits, total
        if k == len(sizes) - 1:
            r = sum(ranks[i] for i in remaining)
            h = 12.0 / (n * (n + 1)) * (acc + r * r / sizes[k]) - 3 * (n + 1)
            total += 1
            if h >= h_obs - tol:
                hits += 1
            return
        for combo in itertools.combinations(remaining, sizes[k]):
            r = sum(ranks[i] for i in combo)
            chosen = set(combo)
            split(tuple(i for i in remaining if i not in chosen), k + 1, acc + r * r / sizes[k])

    split(tuple(range(n)), 0, 0.0)
    return hits / total


def epsilon_squared(h: float, k: int, n: int) -> float:
    if n <= k:
        raise ValueError("epsilon squared needs n > k")
    return (h - k + 1) / (n - k)


def kruskal_wallis(groups: Sequence[Sequence[float]], method: str = "auto", alpha: float = 0.05) -> StatResult:
    """Kruskal-Wallis H with tie correction and epsilon-squared effect size.

    ``method`` is ``"chi2"`` (asymptotic), ``"exact"`` (full permutation
    distribution) or ``"auto"``: exact when the total sample has at most 10
    values and enumeration stays small, asymptotic otherwise. When every value
    is tied the statistic is defined as 0 with p = 1.
    """
    if len(groups) < 2:
        raise ValueError("need at least two groups")
    if any(len(g) == 0 for g in groups):
        raise EmptyGroup("every group needs at least one value")
    if method not in ("auto", "chi2", "exact"):
        raise ValueError(f"unknown method {method!r}")
    pooled = [float(v) for g in groups for v in g]
    sizes = [len(g) for g in groups]
    n, k = len(pooled), len(groups)
    ranks = rank(pooled)
    correction = 1.0 - _tie_term(pooled) / (n ** 3 - n) if n > 1 else 0.0
    eps = epsilon_squared(0.0, k, n) if n > k else None
    if correction <= 0:
        return StatResult("kruskal", 0.0, 1.0, eps, alpha=alpha, df=k - 1, extra={"n": n, "k": k, "method": "degenerate"})
    h = _h_statistic(ranks, sizes, n) / correction
    h = max(h, 0.0)
    use_exact = method == "exact" or (method == "auto" and n <= 10 and _assignments(n, sizes) <= EXACT_KW_LIMIT)
    if use_exact:
        h_raw = _h_statistic(ranks, sizes, n)
        p = _exact_kw_p(ranks, sizes, h_raw)
        used = "exact"
    else:
        p = chi2_sf(h, k - 1)
        used = "chi2"
    eps = epsilon_squared(h, k, n) if n > k else None
    return StatResult("kruskal", h, p, eps, alpha=alpha, df=k - 1, extra={"n": n, "k": k, "method": used})


def holm(pvalues: Sequence[float]) -> List[float]:
    """Holm step-down adjusted p-values, in input order."""
    m = len(pvalues)
    order = sorted(range(m), key=lambda i: pvalues[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank_i, idx in enumerate(order):
        running = max(running, (m - rank_i) * pvalues[idx])
        adjusted[idx] = min(1.0, running)
    return adjusted


def bonferroni(alpha: float, m: int) -> float:
    if m < 1:
        raise ValueError("m must be at least 1")
    return alpha / m


def dunn_posthoc(groups: Sequence[Sequence[float]], names: Optional[Sequence[str]] = None,
                 correction: str = "holm", alpha: float = 0.05) -> List[StatResult]:
    """Pairwise Dunn z-tests on mean ranks with tie correction."""
    if any(len(g) == 0 for g in groups):
        raise EmptyGroup("every group needs at least one value")
    if correction not in ("holm", "bonferroni", "none"):
        raise ValueError(f"unknown correction {correction!r}")
    names = list(names) if names is not None else [str(i) for i in range(len(groups))]
    pooled = [float(v) for g in groups for v in g]
    n = len(pooled)
    ranks = rank(pooled)
    means, pos = [], 0
    for g in groups:
        means.append(sum(ranks[pos:pos + len(g)]) / len(g))
        pos += len(g)
    base = n * (n + 1) / 12.0 - _tie_term(pooled) / (12.0 * (n - 1)) if n > 1 else 0.0
    pairs, raw = [], []
    for i, j in itertools.combinations(range(len(groups)), 2):
        var = base * (1.0 / len(groups[i]) + 1.0 / len(groups[j]))
        z = (means[i] - means[j]) / math.sqrt(var) if var > 0 else 0.0
        pairs.append((i, j, z))
        raw.append(min(1.0, 2 * norm_sf(abs(z))))
    if correction == "holm":
        adj = holm(raw)
    elif correction == "bonferroni":
        adj = [min(1.0, p * len(raw)) for p in raw]
    else:
        adj = list(raw)
    return [
        StatResult("dunn", z, adj[t], alpha=alpha, correction=correction,
                   extra={"pair": [names[i], names[j]], "p_raw": raw[t]})
        for t, (i, j, z) in enumerate(pairs)
    ]


def pearson(x: Sequence[float], y: Sequence[float], alpha: float = 0.05) -> StatResult:
    if len(x) != len(y):
        raise ValueError("samples differ in length")
    n = len(x)
    if n < 3:
        raise ValueError("pearson needs at least 3 pairs")
    mx, my = sum(x) / n, sum(y) / n
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        raise ZeroVariance("a sample has zero variance")
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))
    if abs(r) == 1.0:
        p = 0.0
    else:
        t = r * math.sqrt((n - 2) / (1 - r * r))
        p = t_sf_two_sided(t, n - 2)
    return StatResult("pearson", r, p, alpha=alpha, df=n - 2, extra={"n": n})
