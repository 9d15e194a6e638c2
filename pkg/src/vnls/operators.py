"""Pauli-string operators with O(n) sparse row lookup.

An operator is a weighted sum of tensor products of single-qubit Pauli
factors, with identity on every qubit a term does not name.  Each product
term has exactly one nonzero entry per row of its dense matrix, so row x of
a T-term sum can be recovered in O(n*T) work without ever touching the
2^n-dimensional space.

Bit convention, fixed across the package: qubit 0 is the most significant
bit of a basis index, matching the Kronecker order factor_0 (x) factor_1
(x) ... (x) factor_{n-1} used by to_dense.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import CapabilityError, ParseError

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

# Largest qubit count for which dense 2^n x 2^n materialization is allowed.
DENSE_LIMIT = 14

# Entries below this magnitude are dropped when merging a row.
MERGE_TOL = 1e-15


class PauliTerm:
    """coefficient * (product of X/Y/Z factors) on n qubits.

    ``factors`` maps qubit index -> letter; absent qubits carry identity.
    The row action is precomputed into two bit masks: flipping X/Y bits
    selects the column, and the parity of x against the Y/Z bits fixes the
    sign.  The constant phase (-i)^{#Y} is folded into ``_weight``.
    """

    __slots__ = ("coefficient", "factors", "n", "_flip", "_signs", "_weight")

    def __init__(self, coefficient, factors, n):
        n = int(n)
        if n < 1:
            raise ValueError("need at least one qubit")
        factors = {int(q): str(letter) for q, letter in dict(factors).items()}
        flip = 0
        signs = 0
        n_y = 0
        for q, letter in factors.items():
            if not 0 <= q < n:
                raise ValueError(f"qubit {q} outside [0, {n})")
            if letter not in ("X", "Y", "Z"):
                raise ValueError(f"unknown Pauli letter {letter!r}")
            bit = 1 << (n - 1 - q)
            if letter in ("X", "Y"):
                flip |= bit
            if letter in ("Y", "Z"):
                signs |= bit
            if letter == "Y":
                n_y += 1
        self.coefficient = complex(coefficient)
        self.factors = factors
        self.n = n
        self._flip = flip
        self._signs = signs
        self._weight = self.coefficient * (-1j) ** n_y

    def __eq__(self, other):
        if not isinstance(other, PauliTerm):
            return NotImplemented
        return (self.coefficient == other.coefficient
                and self.factors == other.factors and self.n == other.n)

    def __repr__(self):
        return f"PauliTerm({self.coefficient!r}, {self.factors!r}, n={self.n})"


class PauliSum:
    """Sum of PauliTerms over a shared qubit count."""

    def __init__(self, terms, n):
        n = int(n)
        terms = list(terms)
        for t in terms:
            if not isinstance(t, PauliTerm):
                raise TypeError(f"expected PauliTerm, got {type(t).__name__}")
            if t.n != n:
                raise ValueError(f"term on {t.n} qubits in a sum over {n}")
        self.terms = terms
        self.n = n
        self.is_hermitian = all(t.coefficient.imag == 0.0 for t in terms)

    def scaled(self, factor):
        """New sum with every coefficient multiplied by ``factor``."""
        return PauliSum(
            [PauliTerm(t.coefficient * factor, t.factors, t.n) for t in self.terms],
            self.n)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __repr__(self):
        return f"PauliSum({len(self.terms)} terms, n={self.n})"


def identity_sum(n, coefficient=1.0):
    """coefficient * I on n qubits."""
    return PauliSum([PauliTerm(coefficient, {}, n)], n)


def apply_term_row(t, x):
    """The unique nonzero entry (column, value) of row x of term t.

    value = coefficient * (-i)^{#Y} * (-1)^{popcount(x & yz_mask)} and
    column = x XOR flip_mask.  Vectorizes over an array of row indices.
    """
    xs = np.asarray(x, dtype=np.int64)
    col = xs ^ t._flip
    parity = np.bitwise_count(xs & t._signs) & 1
    val = t._weight * (1.0 - 2.0 * parity)
    if xs.ndim == 0:
        return int(col), complex(val)
    return col, val


def expand_rows(h, x):
    """Column indices and values of rows x, one slot per term, unmerged.

    Returns arrays of shape (len(x), len(h.terms)).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=np.int64))
    cols = np.empty((xs.size, len(h.terms)), dtype=np.int64)
    vals = np.empty((xs.size, len(h.terms)), dtype=np.complex128)
    for j, t in enumerate(h.terms):
        c, v = apply_term_row(t, xs)
        cols[:, j] = c
        vals[:, j] = v
    return cols, vals


def apply_sum_row(h, x):
    """Sparse row x of h as a list of (column, value).

    Duplicate columns are merged; merged entries below MERGE_TOL are
    dropped.  Entry order follows first appearance, so it is deterministic.
    """
    merged = {}
    for t in h.terms:
        col, val = apply_term_row(t, int(x))
        merged[col] = merged.get(col, 0.0j) + val
    return [(c, v) for c, v in merged.items() if abs(v) >= MERGE_TOL]


def _amp_oracle(psi):
    # anything exposing .amp(indices), else a bare callable on indices
    return psi.amp if hasattr(psi, "amp") else psi


def apply_to_state(h, psi, x):
    """(H psi)(x): row values of H times the amplitudes at their columns.

    psi is an amplitude oracle (a Wavefunction or a callable on index
    arrays).  Vectorizes over an array of rows.
    """
    amp = _amp_oracle(psi)
    xs = np.asarray(x, dtype=np.int64)
    cols, vals = expand_rows(h, xs)
    amps = np.asarray(amp(cols.reshape(-1)), dtype=np.complex128).reshape(cols.shape)
    out = (vals * amps).sum(axis=1)
    return complex(out[0]) if xs.ndim == 0 else out


def apply_squared_row(a, psi, x):
    """(A^2 psi)(x) for Hermitian a, via two nested row expansions.

    Costs O(T^2) amplitude reads per row for a T-term sum; the square is
    never formed as an operator.
    """
    if not a.is_hermitian:
        raise ValueError("A must be Hermitian (real coefficients)")
    amp = _amp_oracle(psi)
    xs = np.asarray(x, dtype=np.int64)
    cols1, vals1 = expand_rows(a, xs)
    cols2, vals2 = expand_rows(a, cols1.reshape(-1))
    amps = np.asarray(amp(cols2.reshape(-1)), dtype=np.complex128).reshape(cols2.shape)
    inner = (vals2 * amps).sum(axis=1).reshape(cols1.shape)
    out = (vals1 * inner).sum(axis=1)
    return complex(out[0]) if xs.ndim == 0 else out


def embed_hermitian(a):
    """Hermitian dilation of an arbitrary sum a onto n+1 qubits.

    The ancilla becomes qubit 0 and original qubits shift up by one, giving
    the block matrix [[0, a], [a^H, 0]]: each term c*P contributes
    Re(c)*(X_anc (x) P) - Im(c)*(Y_anc (x) P), with zero parts skipped.
    """
    out = []
    for t in a.terms:
        shifted = {q + 1: letter for q, letter in t.factors.items()}
        re, im = t.coefficient.real, t.coefficient.imag
        if re != 0.0:
            out.append(PauliTerm(re, {0: "X", **shifted}, t.n + 1))
        if im != 0.0:
            out.append(PauliTerm(-im, {0: "Y", **shifted}, t.n + 1))
    return PauliSum(out, a.n + 1)


def term_to_dense(t):
    """Dense 2^n x 2^n matrix of a single term (test oracle sized)."""
    if t.n > DENSE_LIMIT:
        raise CapabilityError(f"dense materialization limited to n <= {DENSE_LIMIT}")
    m = np.array([[t.coefficient]], dtype=complex)
    for q in range(t.n):
        m = np.kron(m, PAULI_MATRICES[t.factors.get(q, "I")])
    return m


def to_dense(h, limit=DENSE_LIMIT):
    """Dense matrix of a sum; refuses n beyond ``limit``."""
    if h.n > limit:
        raise CapabilityError(
            f"dense materialization limited to n <= {limit}, got n={h.n}")
    dim = 1 << h.n
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        out += term_to_dense(t)
    return out


def _parse_float(token):
    try:
        return float(token)
    except ValueError:
        return None


def parse_term_line(line, n, lineno=0):
    """One term: 1-2 leading floats (real [imag]) then Pauli tokens.

    Tokens look like X3 / Y0 / Z12, or a literal I for the identity term.
    """
    tokens = line.split()
    coefs = []
    i = 0
    while i < len(tokens) and i < 2:
        v = _parse_float(tokens[i])
        if v is None:
            break
        coefs.append(v)
        i += 1
    if not coefs:
        raise ParseError(f"line {lineno}: term needs a leading coefficient: {line!r}")
    if i == len(tokens):
        raise ParseError(f"line {lineno}: term needs Pauli tokens (or I): {line!r}")
    coefficient = complex(coefs[0], coefs[1] if len(coefs) == 2 else 0.0)
    factors = {}
    for token in tokens[i:]:
        if token == "I":
            continue
        letter, digits = token[0], token[1:]
        if letter not in ("X", "Y", "Z") or not digits.isdigit():
            raise ParseError(f"line {lineno}: malformed Pauli token {token!r}")
        q = int(digits)
        if q >= n:
            raise ParseError(f"line {lineno}: qubit index {q} out of range for n={n}")
        if q in factors:
            raise ParseError(f"line {lineno}: duplicate qubit {q} within one term")
        factors[q] = letter
    return PauliTerm(coefficient, factors, n)


def parse_pauli_sum(text, n):
    """Parse term lines (one per line, '#' comments) into a PauliSum."""
    terms = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        terms.append(parse_term_line(line, n, lineno))
    return PauliSum(terms, n)


def format_term(t):
    """Inverse of parse_term_line, round-trip exact via repr floats."""
    parts = [repr(t.coefficient.real)]
    if t.coefficient.imag != 0.0:
        parts.append(repr(t.coefficient.imag))
    if t.factors:
        parts.extend(f"{letter}{q}" for q, letter in sorted(t.factors.items()))
    else:
        parts.append("I")
    return " ".join(parts)


def format_pauli_sum(h):
    return "\n".join(format_term(t) for t in h.terms)


def parse_operator_text(text):
    """Operator file body: required ``n=<int>`` header line, then terms."""
    n = None
    pending = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            if not line.startswith("n="):
                raise ParseError(f"line {lineno}: expected header n=<int>, got {line!r}")
            try:
                n = int(line[2:])
            except ValueError:
                raise ParseError(f"line {lineno}: bad qubit count in {line!r}") from None
            if n < 1:
                raise ParseError(f"line {lineno}: qubit count must be positive")
            continue
        pending.append((lineno, line))
    if n is None:
        raise ParseError("missing n=<int> header")
    return PauliSum([parse_term_line(line, n, lineno) for lineno, line in pending], n)


def load_operator(path):
    return parse_operator_text(Path(path).read_text(encoding="utf-8"))


def save_operator(h, path):
    body = format_pauli_sum(h)
    text = f"n={h.n}\n" + (body + "\n" if body else "")
    Path(path).write_text(text, encoding="utf-8")
