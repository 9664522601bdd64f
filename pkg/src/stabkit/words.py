"""Multiplicative generators of free E_k-algebra homotopy.

Below-diagonal generators for k = 2 come from the free restricted Lie
algebra on the input classes (Lyndon basic products plus restriction
towers; at odd p also zeta applied to odd elements). For k >= 3 they are
the iterated Dyer-Lashof towers on the input classes. Everything is
tridegree bookkeeping over named inputs sitting at (n, n-1, -1); at odd p
the relation set is not normalized, so tables carry an
``unverified_relations`` flag beyond the paper-backed towers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .fields import FieldSpec, UsageError
from .grading import Box, Degree, compare_x_order
from .monomials import GeneratorSpec, monomial_dims, sort_generators


@dataclass(frozen=True)
class OpWord:
    """An operation word: a label, its tridegree, and how it was built."""

    label: str
    degree: Degree
    tokens: tuple  # construction trace, innermost first

    def __str__(self):
        return self.label


def _require_shifted_diagonal(gens):
    for g in gens:
        deg = g.degree
        if deg.n < 1 or deg.d != deg.n - 1 or deg.f != -1:
            raise UsageError(
                f"generator {g.name} must sit at (n, n-1, -1), got {deg}")


def _lyndon_words(alphabet, max_len):
    """All Lyndon words over the index alphabet 0..k-1, lengths 1..max_len."""
    k = len(alphabet)
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m <= max_len:
            out.append(tuple(w))
        while len(w) < max_len:
            w.append(w[len(w) % m])
        while w and w[-1] == k - 1:
            w.pop()
    return sorted(out, key=lambda t: (len(t), t))


def _standard_bracketing(word, names):
    """Label of the basic product for a Lyndon word (standard factorization)."""
    if len(word) == 1:
        return names[word[0]]
    for i in range(1, len(word)):
        suffix = word[i:]
        if _is_lyndon(suffix):
            left = _standard_bracketing(word[:i], names)
            right = _standard_bracketing(suffix, names)
            return f"[{left},{right}]"
    raise AssertionError("unreachable: every Lyndon word factors")


def _is_lyndon(w):
    return all(w < w[i:] + w[:i] for i in range(1, len(w)))


def _bracket_degree(gens_sorted, word) -> Degree:
    n = sum(gens_sorted[i].degree.n for i in word)
    d = sum(gens_sorted[i].degree.d for i in word) + (len(word) - 1)
    f = sum(gens_sorted[i].degree.f for i in word)
    return Degree(n, d, f)


def _xi_degree(p: int, deg: Degree) -> Degree:
    # restriction preserves d = n-1: p|x| + (0, p-1, 0)
    return Degree(p * deg.n, p * deg.d + p - 1, p * deg.f)


def _zeta_degree(p: int, deg: Degree) -> Degree:
    return Degree(p * deg.n, p * deg.d + p - 2, p * deg.f)


def e2_below_diagonal_generators(p: int, gens, box: Box) -> list:
    """Basis words of the free restricted lambda_1-algebra inside the box."""
    _require_shifted_diagonal(gens)
    gens_sorted = sort_generators(gens)
    names = [g.name for g in gens_sorted]
    out = []

    basics = []
    if gens_sorted:
        for word in _lyndon_words(names, box.n_max):
            deg = _bracket_degree(gens_sorted, word)
            if deg.n > box.n_max:
                continue
            label = _standard_bracketing(word, names)
            basics.append(OpWord(label, deg, ("basic", word)))
    if p != 2:
        # the shifted bracket squares even-d elements: [w,w] != 0 iff d(w)+1 odd
        for w in list(basics):
            if w.degree.d % 2 == 0:
                deg = Degree(2 * w.degree.n, 2 * w.degree.d + 1, 2 * w.degree.f)
                if deg.n <= box.n_max:
                    basics.append(OpWord(f"[{w.label},{w.label}]", deg,
                                         w.tokens + ("square",)))

    for w in basics:
        out.append(w)
        # restriction towers: every element at p=2, even-d elements at odd p
        cur = w
        j = 1
        while True:
            if p != 2 and cur.degree.d % 2 == 1:
                break
            deg = _xi_degree(p, cur.degree)
            if deg.n > box.n_max:
                break
            cur = OpWord(f"xi^{j}({w.label})" if j > 1 else f"xi({w.label})",
                         deg, w.tokens + ("xi",) * j)
            out.append(cur)
            j += 1
        if p != 2 and w.degree.d % 2 == 1:
            deg = _zeta_degree(p, w.degree)
            if deg.n <= box.n_max:
                out.append(OpWord(f"zeta({w.label})", deg, w.tokens + ("zeta",)))

    for w in out:
        D, N = w.degree.d, w.degree.n
        assert D == N - 1 or (p != 2 and D == N - 2 and N % 2 == 0), w
    return sorted(out, key=_word_sort_key)


def _word_sort_key(w: OpWord):
    return (w.degree.n, w.degree.d, w.degree.f, w.label)


def ek_below_diagonal_generators(p: int, k, gens, box: Box) -> list:
    """Dyer-Lashof towers below the diagonal for E_k-algebras, k >= 3 or infinity."""
    if k != "inf" and (not isinstance(k, int) or k < 3):
        raise UsageError("use the E_2 enumeration for k < 3")
    _require_shifted_diagonal(gens)
    out = []
    for g in sort_generators(gens):
        n = g.degree.n
        out.append(OpWord(f"[{g.name}]", g.degree, ("leaf", g.name)))
        if p != 2 and n % 2 == 1:
            continue
        s = n if p == 2 else n // 2
        deg = g.degree
        ops = []
        while True:
            deg = (Degree(2 * deg.n, deg.d + s, 2 * deg.f) if p == 2 else
                   Degree(p * deg.n, deg.d + 2 * s * (p - 1), p * deg.f))
            if deg.n > box.n_max:
                break
            ops = [f"Q{s}"] + ops
            label = " ".join(ops) + f" [{g.name}]"
            out.append(OpWord(label, deg, ("leaf", g.name) + tuple(ops)))
            if p != 2:
                out.append(OpWord("b" + label, Degree(deg.n, deg.d - 1, deg.f),
                                  ("leaf", g.name) + tuple(ops) + ("beta",)))
            s *= p
    for w in out:
        D, N = w.degree.d, w.degree.n
        assert D == N - 1 or (p != 2 and D == N - 2 and N % 2 == 0), w
    return sorted(out, key=_word_sort_key)


@dataclass
class XSequence:
    """The ordered sequence of non-nilpotent below-diagonal generators."""

    entries: list            # list of (label, Degree)
    field: FieldSpec
    unverified_relations: bool = False

    def labels(self):
        return [e[0] for e in self.entries]

    def degrees(self):
        return [e[1] for e in self.entries]


def _x_sort_key(item):
    label, deg = item
    if deg.d == 0:
        slopes = (Fraction(0), Fraction(0))
    else:
        slopes = (Fraction(deg.d, deg.n), Fraction(deg.f, deg.d))
    return (slopes, deg.n, deg.d, deg.f, label)


def x_sequence(p: int, k, gens, box: Box) -> XSequence:
    """Below-diagonal generators sorted by the (d/n, f/d) total order."""
    words = (e2_below_diagonal_generators(p, gens, box) if k == 2
             else ek_below_diagonal_generators(p, k, gens, box))
    entries = []
    for w in words:
        if p != 2 and w.degree.d % 2 == 1:
            continue  # only even homological degree enters X at odd p
        if w.degree.d >= w.degree.n:
            continue
        entries.append((w.label, w.degree))
    entries.sort(key=_x_sort_key)
    seq = XSequence(entries, FieldSpec.prime(p), unverified_relations=(p != 2))
    for a, b in zip(seq.entries, seq.entries[1:]):
        if a[1].d and b[1].d:
            assert compare_x_order(a[1], b[1]) <= 0
    return seq


def free_ek_generator_words(p: int, k, gens, box: Box):
    """The full generator word set of the free E_k-algebra, and a reliability flag.

    Exact at p = 2 for k = 2 (symmetric algebra on the free restricted Lie
    algebra) and k = infinity (admissible Dyer-Lashof words). Otherwise a
    spanning admissible set whose dimensions are flagged unverified.
    """
    unverified = p != 2
    if k == 2:
        words = e2_below_diagonal_generators(p, gens, box)
        return words, unverified
    if p == 2:
        words, complete = _admissible_dl_words(p, k, gens, box)
        return words, unverified or not complete
    return ek_below_diagonal_generators(p, k, gens, box), True


def _admissible_dl_words(p: int, k, gens, box: Box):
    """Admissible Q-words at p=2: t_i > d_{i-1}, t_{i+1} <= 2 t_i, E_k top cap."""
    _require_shifted_diagonal(gens)
    out = []
    complete = k == "inf"
    for g in sort_generators(gens):
        stack = [((), g.degree)]
        out.append(OpWord(f"[{g.name}]", g.degree, ("leaf", g.name)))
        while stack:
            ops, deg = stack.pop()
            lo = deg.d + 1
            hi = box.d_max - deg.d
            if ops:
                hi = min(hi, 2 * int(ops[0][1:]))
            if k != "inf":
                hi = min(hi, deg.d + k - 1)
            for s in range(lo, hi + 1):
                ndeg = Degree(2 * deg.n, deg.d + s, 2 * deg.f)
                if ndeg.n > box.n_max or ndeg.d > box.d_max:
                    continue
                nops = (f"Q{s}",) + ops
                label = " ".join(nops) + f" [{g.name}]"
                out.append(OpWord(label, ndeg, ("leaf", g.name) + nops))
                stack.append((nops, ndeg))
    return sorted(out, key=_word_sort_key), complete


def free_ek_dimension_table(p: int, k, gens, box: Box):
    """Dims of the free graded-commutative algebra on the full word set.

    Returns (dims dict Degree -> count, unverified_relations flag).
    """
    words, unverified = free_ek_generator_words(p, k, gens, box)
    field = FieldSpec.prime(p)
    word_gens = [GeneratorSpec(w.label, Degree(w.degree.n, w.degree.d),
                               _word_parity(p, w.degree))
                 for w in words]
    return monomial_dims(field, word_gens, box), unverified


def _word_parity(p: int, deg: Degree) -> str:
    if p == 2:
        return "even"
    return "odd" if deg.d % 2 else "even"


def free_ek_algebra_generators(p: int, k, gens, box: Box):
    """GeneratorSpecs for the free algebra's word set (for downstream engines)."""
    words, unverified = free_ek_generator_words(p, k, gens, box)
    return ([GeneratorSpec(w.label, w.degree, _word_parity(p, w.degree))
             for w in words], unverified)
