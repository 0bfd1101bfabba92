"""FCIDUMP text-file interchange for molecular integral tensors.

The FCIDUMP format stores restricted-orbital integrals as a Fortran-style
namelist header followed by plain-text records::

     &FCI NORB=4,NELEC=4,MS2=0,
      ORBSYM=1,1,1,1,
      ISYM=1,
     &END
     <value>  i  j  k  l

Record classification follows the common convention (1-based labels):

* all four indices positive  -> two-electron integral (ij|kl) in
  chemist notation,
* ``k = l = 0`` with ``i, j`` positive -> one-body element h_ij,
* ``j = k = l = 0`` with ``i`` positive -> orbital-energy record
  (read and ignored; we never write them),
* all four indices zero -> constant (nuclear-repulsion/core) energy.

Only one symmetry-unique representative per 8-fold orbit is written;
reading fills the full orbit.  The chemist-notation file labels are
converted to the internal ``<kl|mn>`` convention of
:class:`~hcbmeasure.integrals.IntegralTensors` exactly once, inside
:func:`read_fcidump` / :func:`write_fcidump`.
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from .integrals import IntegralTensors, chemist_to_internal, internal_to_chemist

__all__ = ["read_fcidump", "write_fcidump", "read_fcidump_header"]

# %.17g round-trips every IEEE double exactly, so read(write(T)) == T.
_FLOAT_FORMAT = "%.17g"

# Values this close are the same record repeated, not a conflict.
_DUPLICATE_TOL = 1e-12


def _eri_canonical(i: int, j: int, k: int, l: int) -> tuple[int, int, int, int]:
    """Canonical representative of the 8-fold orbit of chemist labels (ij|kl)."""
    ij = (i, j) if i >= j else (j, i)
    kl = (k, l) if k >= l else (l, k)
    return ij + kl if ij >= kl else kl + ij


def _parse_header(text: str) -> tuple[dict[str, int], int]:
    """Parse the namelist header; return (fields, offset past the header).

    Accepts both ``&END`` and the bare ``/`` namelist terminator, keys in
    any case, and values separated by ``=`` with comma/whitespace noise.
    """
    stripped = text.lstrip()
    if not stripped.upper().startswith("&FCI"):
        raise ValueError("malformed FCIDUMP header: file does not start with &FCI")
    start = text.index(stripped[:4]) + 4

    end_match = re.search(r"&END|^\s*/\s*$", text[start:], re.IGNORECASE | re.MULTILINE)
    if end_match is None:
        raise ValueError("malformed FCIDUMP header: missing &END (or /) terminator")
    header_body = text[start : start + end_match.start()]
    offset = start + end_match.end()

    fields: dict[str, int] = {}
    for key, value in re.findall(r"([A-Za-z0-9_]+)\s*=\s*([^=,\s]+)", header_body):
        key = key.upper()
        if key in ("NORB", "NELEC", "MS2", "ISYM"):
            try:
                fields[key] = int(value)
            except ValueError as exc:
                raise ValueError(
                    f"malformed FCIDUMP header: {key}={value!r} is not an integer"
                ) from exc
    if "NORB" not in fields:
        raise ValueError("malformed FCIDUMP header: NORB is missing")
    if fields["NORB"] < 1:
        raise ValueError(f"malformed FCIDUMP header: NORB={fields['NORB']} must be >= 1")
    if fields.get("NELEC", 0) < 0:
        raise ValueError(f"malformed FCIDUMP header: NELEC={fields['NELEC']} is negative")
    return fields, offset


def read_fcidump_header(path: str | Path) -> dict[str, int]:
    """Return the integer header fields (NORB, and NELEC/MS2/ISYM when present)."""
    fields, _ = _parse_header(Path(path).read_text())
    return fields


class _DedupStore:
    """Assignment store that rejects conflicting duplicate records."""

    def __init__(self, what: str) -> None:
        self._what = what
        self._values: dict[tuple[int, ...], float] = {}

    def assign(self, key: tuple[int, ...], value: float, line_no: int) -> None:
        previous = self._values.get(key)
        if previous is not None and abs(previous - value) > _DUPLICATE_TOL:
            labels = " ".join(str(x) for x in key)
            raise ValueError(
                f"line {line_no}: conflicting duplicate {self._what} record for "
                f"indices {labels}: {previous!r} vs {value!r}"
            )
        self._values[key] = value

    def items(self):
        return self._values.items()


def read_fcidump(path: str | Path) -> IntegralTensors:
    """Read an FCIDUMP file into internal-convention integral tensors.

    The one conversion from chemist-notation file labels to the internal
    two-body convention happens here.  Orbital-energy records
    (``value i 0 0 0``) are tolerated and ignored.  Raises ``ValueError``
    on a malformed header, an index outside ``1..NORB``, a token count
    other than five, or duplicate records that disagree.
    """
    text = Path(path).read_text()
    fields, offset = _parse_header(text)
    norb = fields["NORB"]

    eri_store = _DedupStore("two-electron")
    h_store = _DedupStore("one-body")
    core_store = _DedupStore("core-energy")

    body_start_line = text[:offset].count("\n")
    for rel_line, raw in enumerate(text[offset:].splitlines()):
        line_no = body_start_line + rel_line + 1
        line = raw.strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 5:
            raise ValueError(
                f"line {line_no}: expected 'value i j k l' (5 tokens), got {len(tokens)}"
            )
        try:
            value = float(tokens[0])
            i, j, k, l = (int(t) for t in tokens[1:])
        except ValueError as exc:
            raise ValueError(f"line {line_no}: unparseable record {line!r}") from exc
        for idx in (i, j, k, l):
            if idx < 0 or idx > norb:
                raise ValueError(
                    f"line {line_no}: orbital index {idx} outside 1..{norb}"
                )

        if i == j == k == l == 0:
            core_store.assign((), value, line_no)
        elif min(i, j, k, l) > 0:
            eri_store.assign(_eri_canonical(i, j, k, l), value, line_no)
        elif i > 0 and j > 0 and k == 0 and l == 0:
            h_store.assign((max(i, j), min(i, j)), value, line_no)
        elif i > 0 and j == k == l == 0:
            continue  # orbital-energy record: informational only
        else:
            raise ValueError(
                f"line {line_no}: index pattern {i} {j} {k} {l} matches no "
                "FCIDUMP record type"
            )

    h = np.zeros((norb, norb))
    for (a, b), value in h_store.items():
        h[a - 1, b - 1] = value
        h[b - 1, a - 1] = value

    chemist = np.zeros((norb, norb, norb, norb))
    for (a, b, c, d), value in eri_store.items():
        p, q, r, s = a - 1, b - 1, c - 1, d - 1
        for pp, qq, rr, ss in (
            (p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
            (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p),
        ):
            chemist[pp, qq, rr, ss] = value

    e_nuc = next((v for _, v in core_store.items()), 0.0)
    return IntegralTensors(
        n_orbitals=norb,
        one_body=h,
        two_body=chemist_to_internal(chemist),
        e_nuc=e_nuc,
        basis="fcidump",
    )


def write_fcidump(
    tensors: IntegralTensors,
    path: str | Path,
    n_electrons: int | None = None,
    ms2: int = 0,
) -> None:
    """Write integral tensors as a conventional FCIDUMP file.

    ``n_electrons`` defaults to one electron per orbital (the hydrogen-chain
    half-filling this package targets).  Two-body entries are converted from
    the internal convention to chemist-notation labels exactly once; only
    8-fold-unique nonzero records are emitted, followed by the one-body
    records and the core-energy terminator line.
    """
    n = tensors.n_orbitals
    if n_electrons is None:
        n_electrons = n
    chemist = internal_to_chemist(tensors.two_body)

    lines = [
        f" &FCI NORB={n},NELEC={n_electrons},MS2={ms2},",
        "  ORBSYM=" + "1," * n,
        "  ISYM=1,",
        " &END",
    ]

    def record(value: float, i: int, j: int, k: int, l: int) -> str:
        return f"{_FLOAT_FORMAT % value} {i:4d} {j:4d} {k:4d} {l:4d}"

    seen: set[tuple[int, int, int, int]] = set()
    for p in range(1, n + 1):
        for q in range(1, p + 1):
            for r in range(1, p + 1):
                for s in range(1, r + 1):
                    key = _eri_canonical(p, q, r, s)
                    if key in seen:
                        continue
                    seen.add(key)
                    value = chemist[p - 1, q - 1, r - 1, s - 1]
                    if value != 0.0:
                        lines.append(record(value, p, q, r, s))
    for p in range(1, n + 1):
        for q in range(1, p + 1):
            value = tensors.one_body[p - 1, q - 1]
            if value != 0.0:
                lines.append(record(value, p, q, 0, 0))
    lines.append(record(tensors.e_nuc, 0, 0, 0, 0))
    Path(path).write_text("\n".join(lines) + "\n")
