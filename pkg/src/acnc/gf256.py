"""GF(2^8) arithmetic and the RLNC encode/recode/eliminate primitives used
as the verification oracle.

Field polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d), table-driven multiply.
"""

FIELD_SIZE = 256
_POLY = 0x11D

EXP = [0] * 512
LOG = [0] * 256


def _init_tables():
    x = 1
    for i in range(255):
        EXP[i] = x
        LOG[x] = i
        x <<= 1
        if x & 0x100:
            x ^= _POLY
    for i in range(255, 510):
        EXP[i] = EXP[i - 255]


_init_tables()


def gf_add(a, b):
    return a ^ b


def gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return EXP[LOG[a] + LOG[b]]


def gf_inv(a):
    if a == 0:
        raise ZeroDivisionError("no inverse of 0 in GF(256)")
    return EXP[255 - LOG[a]]


def gf_div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by 0 in GF(256)")
    if a == 0:
        return 0
    return EXP[(LOG[a] - LOG[b]) % 255]


def vec_scale(v, c):
    if c == 0:
        return [0] * len(v)
    lc = LOG[c]
    return [0 if x == 0 else EXP[LOG[x] + lc] for x in v]


def vec_add(u, v):
    return [a ^ b for a, b in zip(u, v)]


def encode(packets, coefficients):
    """Componentwise sum of mu_i * p_i over the field.

    ``packets`` are equal-length symbol vectors, one per window position.
    """
    if len(packets) != len(coefficients):
        raise ValueError("coefficient count must equal window size")
    length = len(packets[0])
    out = [0] * length
    for p, mu in zip(packets, coefficients):
        if len(p) != length:
            raise ValueError("payload length mismatch")
        if mu == 0:
            continue
        lm = LOG[mu]
        out = [o ^ (0 if x == 0 else EXP[LOG[x] + lm]) for o, x in zip(out, p)]
    return out


def recode(rows, coefficients):
    """Random element of the row space: combine held coded rows
    (coefficient vectors and payloads alike) with fresh coefficients.

    Each row is a (coeff_vector, payload) pair sharing a common window
    frame; either part may be None as long as it is None for every row.
    """
    if not rows:
        raise ValueError("cannot recode an empty hold")
    if len(rows) != len(coefficients):
        raise ValueError("one coefficient per held row required")
    coeff_part = None
    payload_part = None
    for (cv, pl), mu in zip(rows, coefficients):
        if cv is not None:
            scaled = vec_scale(cv, mu)
            coeff_part = scaled if coeff_part is None else vec_add(coeff_part, scaled)
        if pl is not None:
            scaled = vec_scale(pl, mu)
            payload_part = scaled if payload_part is None else vec_add(payload_part, scaled)
    return coeff_part, payload_part


def eliminate(rows, ncols=None):
    """Reduced row-echelon form of dense coefficient rows.

    Returns (rank, solved_indices, rref_rows).  An index is solved when a
    unit row for its column emerges.  Payload symbols appended beyond the
    first ``ncols`` columns travel with the elimination.
    """
    if not rows:
        return 0, [], []
    work = [list(r) for r in rows]
    if ncols is None:
        ncols = len(work[0])
    pivots = {}
    rank = 0
    for row in work:
        for col in range(ncols):
            if row[col] == 0:
                continue
            if col in pivots:
                factor = row[col]
                prow = pivots[col]
                lf = LOG[factor]
                for k in range(col, len(row)):
                    if prow[k]:
                        row[k] ^= EXP[LOG[prow[k]] + lf]
            else:
                inv = gf_inv(row[col])
                li = LOG[inv]
                for k in range(col, len(row)):
                    if row[k]:
                        row[k] = EXP[LOG[row[k]] + li]
                pivots[col] = row
                rank += 1
                break
    # back-substitution to full RREF
    for col in sorted(pivots, reverse=True):
        prow = pivots[col]
        for c2, other in pivots.items():
            if c2 < col and other[col]:
                lf = LOG[other[col]]
                for k in range(col, len(prow)):
                    if prow[k]:
                        other[k] ^= EXP[LOG[prow[k]] + lf]
    solved = []
    for col, prow in pivots.items():
        if all(prow[k] == 0 for k in range(ncols) if k != col):
            solved.append(col)
    solved.sort()
    return rank, solved, [pivots[c] for c in sorted(pivots)]


class IncrementalDecoder:
    """Maintains an RREF of received coefficient rows keyed by global
    information-packet index; the destination's Gaussian-elimination oracle.

    Rows are sparse dicts {index: element}.  ``absorb`` returns True when
    the row was innovative (increased rank).

    With ``reverse=True`` the pivot of each row is its highest index instead
    of its lowest.  In that ordering the pivot rows with pivot at most e form
    a basis of the intersection of the row space with the span of packets
    0..e, which is what a re-encoder needs to realize narrow-span emissions.
    """

    def __init__(self, reverse=False):
        self.pivots = {}     # leading index -> row dict (leading coef 1)
        self.reverse = reverse

    def _reduce(self, row):
        for col in sorted(row, reverse=self.reverse):
            if row[col] == 0:
                continue
            prow = self.pivots.get(col)
            if prow is None:
                continue
            lf = LOG[row[col]]
            for k, v in prow.items():
                row[k] = row.get(k, 0) ^ (EXP[LOG[v] + lf] if v else 0)
        return {k: v for k, v in row.items() if v}

    def absorb(self, row) -> bool:
        row = self._reduce(dict(row))
        if not row:
            return False
        lead = max(row) if self.reverse else min(row)
        inv = gf_inv(row[lead])
        li = LOG[inv]
        row = {k: EXP[LOG[v] + li] for k, v in row.items() if v}
        # clear this column from existing pivot rows to keep full RREF
        for prow in self.pivots.values():
            c = prow.get(lead, 0)
            if c:
                lf = LOG[c]
                for k, v in row.items():
                    prow[k] = prow.get(k, 0) ^ (EXP[LOG[v] + lf] if v else 0)
                for k in [k for k, v in prow.items() if v == 0]:
                    del prow[k]
        self.pivots[lead] = row
        return True

    @property
    def rank(self):
        return len(self.pivots)

    def solved_indices(self):
        return sorted(c for c, row in self.pivots.items() if len(row) == 1)

    def inorder_frontier(self) -> int:
        """Highest k with packets 0..k all solved; -1 when packet 0 is not."""
        k = -1
        solved = set(self.solved_indices())
        while k + 1 in solved:
            k += 1
        return k
