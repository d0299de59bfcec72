"""Weighted iterated function systems of similarities S_j(x) = r_j x + d_j on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from gmpy2 import mpq

from .field import RATIONALS, FieldError, Number, NumberField, Q, literal, to_float

DEFAULT_WORD_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """An enumeration hit its configured cap; ``partial`` holds what was completed."""

    def __init__(self, message: str, cap: int, partial=None):
        super().__init__(message)
        self.cap = cap
        self.partial = partial


class IFSError(ValueError):
    pass


@dataclass(frozen=True)
class Word:
    letters: tuple
    ratio: Number
    prob: object
    left: Number

    @property
    def right(self) -> Number:
        return self.left + self.ratio

    @property
    def parent(self) -> tuple:
        return self.letters[:-1]


class WeightedIFS:
    """Maps sorted by (S_j(0), r_j); probabilities follow their maps."""

    def __init__(
        self,
        ratios: Sequence,
        translations: Sequence,
        probs: Sequence,
        field: NumberField = RATIONALS,
        name: str | None = None,
    ):
        if not (len(ratios) == len(translations) == len(probs)):
            raise IFSError("ratios, translations and probabilities must have equal length")
        if len(ratios) < 2:
            raise IFSError("at least two maps are required")
        self.field = field
        rs = [self._coerce(v) for v in ratios]
        ds = [self._coerce(v) for v in translations]
        ps = [Q(v) for v in probs]
        for j, r in enumerate(rs):
            if not (0 < r < 1):
                raise IFSError(f"ratio of map {j} is {literal(r)}; need 0 < r < 1")
        for j, p in enumerate(ps):
            if p <= 0:
                raise IFSError(f"probability of map {j} is {p}; need p > 0")
        total = sum(ps, mpq(0))
        if total != 1:
            raise IFSError(f"probabilities sum to {total}")
        order = sorted(range(len(rs)), key=lambda j: (ds[j], rs[j]))
        self.ratios = tuple(rs[j] for j in order)
        self.translations = tuple(ds[j] for j in order)
        self.probs = tuple(ps[j] for j in order)
        for j in range(1, len(order)):
            if self.ratios[j] == self.ratios[j - 1] and self.translations[j] == self.translations[j - 1]:
                raise IFSError(f"duplicate map r={literal(self.ratios[j])}, d={literal(self.translations[j])}")
        if any(d < 0 for d in self.translations) or any(d + r > 1 for r, d in zip(self.ratios, self.translations)):
            raise IFSError("every image S_j[0,1] must lie inside [0,1]")
        if self.translations[0] != 0:
            raise IFSError("some map must fix 0 (S_0(0) = 0)")
        if max(d + r for r, d in zip(self.ratios, self.translations)) != 1:
            raise IFSError("some map must fix 1 (S_j(1) = 1)")
        self.name = name
        self.m = len(self.ratios)
        self.lam = min(self.ratios)
        self.rmax = max(self.ratios)
        self.pmin = min(self.probs)
        self.equicontractive = all(r == self.lam for r in self.ratios)
        self.full_support = self._full_support()
        self.theta = self._theta()
        self._lam_pows = [mpq(1)]

    def _coerce(self, value) -> Number:
        if isinstance(value, (list, tuple)):
            return self.field(list(value))
        try:
            return self.field(value)
        except FieldError:
            raise
        except Exception as exc:  # pragma: no cover - defensive
            raise IFSError(str(exc)) from exc

    # ------------------------------------------------------------ constants
    def _theta(self) -> int:
        target = self.lam * self.lam
        theta = 0
        acc = self.rmax
        while not acc < target:
            theta += 1
            acc = acc * self.rmax
        return theta

    def _full_support(self) -> bool:
        reach: Number = mpq(0)
        for r, d in sorted(zip(self.ratios, self.translations), key=lambda t: t[1]):
            if d > reach:
                return False
            if d + r > reach:
                reach = d + r
        return reach == 1

    @property
    def is_regular(self) -> bool:
        """Equicontractive with both edge maps carrying the minimal probability."""
        left = [p for p, d in zip(self.probs, self.translations) if d == 0]
        right = [p for p, r, d in zip(self.probs, self.ratios, self.translations) if d + r == 1]
        return self.equicontractive and all(p == self.pmin for p in left + right)

    def lam_pow(self, n: int) -> Number:
        while len(self._lam_pows) <= n:
            self._lam_pows.append(self._lam_pows[-1] * self.lam)
        return self._lam_pows[n]

    def fixes_zero(self) -> list[int]:
        return [j for j, d in enumerate(self.translations) if d == 0]

    def fixes_one(self) -> list[int]:
        return [j for j, (r, d) in enumerate(zip(self.ratios, self.translations)) if d + r == 1]

    # ------------------------------------------------------------ words
    def word(self, letters: Sequence[int]) -> Word:
        a: Number = mpq(0)
        r: Number = mpq(1)
        p = mpq(1)
        for j in letters:
            a = a + r * self.translations[j]
            r = r * self.ratios[j]
            p = p * self.probs[j]
        return Word(tuple(letters), r, p, a)

    def extension_words(self, rel_ratio: Number) -> tuple:
        """Words w with rel*r_w <= 1 < rel*r_{w-}; the empty word when rel <= 1.

        ``rel`` is r_u divided by the target scale, so the answer depends only on
        that quotient. Results are ``(letters, r_w, p_w, S_w(0))`` tuples in
        lexicographic order.
        """
        return _extensions(self, rel_ratio)

    def lambda_n_words(self, n: int, budget: int = DEFAULT_WORD_BUDGET) -> list[Word]:
        """The cross-section of words at scale lam**n, in lexicographic order."""
        if n < 1:
            raise ValueError("n must be at least 1")
        threshold = self.lam_pow(n)
        out: list[Word] = []
        stack = [((), mpq(1), mpq(1), mpq(0))]
        while stack:
            letters, r, p, a = stack.pop()
            if r <= threshold:
                out.append(Word(letters, r, p, a))
                if len(out) > budget:
                    raise BudgetExceeded(f"more than {budget} words at level {n}", budget, out)
                continue
            for j in reversed(range(self.m)):
                stack.append((letters + (j,), r * self.ratios[j], p * self.probs[j], a + r * self.translations[j]))
        return out

    # ------------------------------------------------------------ reporting
    def describe(self) -> dict:
        return {
            "name": self.name,
            "field": None
            if self.field.is_rational
            else {
                "min_poly": list(self.field.min_poly_int),
                "root_interval": [str(v) for v in self.field.root_interval],
            },
            "maps": [{"r": literal(r), "d": literal(d)} for r, d in zip(self.ratios, self.translations)],
            "probs": [str(p) for p in self.probs],
            "lambda": literal(self.lam),
            "lambda_float": to_float(self.lam)[0],
            "theta": self.theta,
            "equicontractive": self.equicontractive,
            "full_support": self.full_support,
            "regular": self.is_regular,
        }

    def __repr__(self) -> str:
        maps = ", ".join(f"{literal(r)}x+{literal(d)}" for r, d in zip(self.ratios, self.translations))
        return f"WeightedIFS([{maps}], p={[str(p) for p in self.probs]})"



def _extensions(ifs: WeightedIFS, rel: Number) -> tuple:
    cache = ifs.__dict__.setdefault("_ext_cache", {})
    hit = cache.get(rel)
    if hit is not None:
        return hit
    out = []
    if rel <= 1:
        out.append(((), mpq(1), mpq(1), mpq(0)))
    else:
        stack = [((), mpq(1), mpq(1), mpq(0))]
        while stack:
            letters, r, p, a = stack.pop()
            if rel * r <= 1:
                out.append((letters, r, p, a))
                continue
            for j in reversed(range(ifs.m)):
                stack.append((letters + (j,), r * ifs.ratios[j], p * ifs.probs[j], a + r * ifs.translations[j]))
    result = tuple(out)
    cache[rel] = result
    return result

