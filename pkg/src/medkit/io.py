"""JSON files for ensembles and measurements.

Ensemble file::

    {
      "dim": 2,
      "eta": "1/4",
      "eta_prime": "1/4",
      "seed": {"bloch": {"m": 1, "a": 1.0, "n": [1, 0, 0]}},
      "seed_prime": {"matrix": [["0.5", "0-0.5j"], ["0+0.5j", "0.5"]]},
      "unitaries": {"z_angles": [0, 1], "unit": "pi"},
      "unitaries_prime": {"matrices": [[["1", "0"], ["0", "1"]]]},
      "solver": "auto"
    }

Reals may be numbers or fraction strings ("1/6").  Complex entries are
numbers, ``"re+imj"`` strings or ``[re, im]`` pairs.  Unitaries are given
by one of

* ``z_angles``: rotation angles about z (qubits), in radians or, with
  ``"unit": "pi"``, multiples of pi;
* ``matrices``: explicit unitaries, the first equal to I;
* ``spinor_thetas``: one list of ``[i, k, theta]`` triples per unitary with
  1-based gamma indices, giving ``exp(-sum theta_ik g_i g_k)``; the first
  list is empty.

Measurement file: ``{"dim": d, "n": n, "elements": [matrix, ...]}`` with
the first ``n`` elements belonging to the unprimed set.

Errors are reported as :class:`SchemaError` with the line of the offending
key when it can be located.
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from pathlib import Path

import numpy as np

from .blochdirac import GeneralizedBlochState, bloch_to_state, dirac_gammas
from .ensembles import TwoSetEnsemble, spinor_unitary, z_rotation
from .errors import MedkitError, SchemaError
from .povm import Povm

SOLVER_KEY = "solver"


class _Doc:
    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        try:
            self.data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"{source}: invalid JSON: {exc.msg}", exc.lineno) from None
        if not isinstance(self.data, dict):
            raise SchemaError(f"{source}: top level must be an object", 1)

    def line(self, key: str) -> int | None:
        m = re.search(r'"%s"\s*:' % re.escape(key), self.text)
        return self.text.count("\n", 0, m.start()) + 1 if m else None

    def fail(self, key: str, msg: str):
        raise SchemaError(f"{self.source}: {msg}", self.line(key))

    def get(self, key: str, default=...):
        if key not in self.data:
            if default is ...:
                raise SchemaError(f"{self.source}: missing field {key!r}", None)
            return default
        return self.data[key]


def real_value(value) -> float:
    """A number or a fraction string such as ``"1/6"``."""
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def _real(doc: _Doc, key: str, value) -> float:
    if isinstance(value, bool):
        doc.fail(key, f"{key}: expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            pass
    doc.fail(key, f"{key}: expected a number or fraction string, got {value!r}")


def _complex(doc: _Doc, key: str, value) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", ""))
        except ValueError:
            pass
    if isinstance(value, list) and len(value) == 2:
        return complex(_real(doc, key, value[0]), _real(doc, key, value[1]))
    doc.fail(key, f"{key}: cannot read {value!r} as a complex number")


def _matrix(doc: _Doc, key: str, rows, dim: int) -> np.ndarray:
    if not isinstance(rows, list) or len(rows) != dim or any(
        not isinstance(r, list) or len(r) != dim for r in rows
    ):
        doc.fail(key, f"{key}: expected a {dim}x{dim} matrix")
    return np.array([[_complex(doc, key, v) for v in r] for r in rows])


def _seed(doc: _Doc, key: str, dim: int) -> np.ndarray:
    spec = doc.get(key)
    if not isinstance(spec, dict) or len(spec) != 1:
        doc.fail(key, f"{key}: expected {{'bloch': ...}} or {{'matrix': ...}}")
    (kind, body), = spec.items()
    if kind == "matrix":
        return _matrix(doc, key, body, dim)
    if kind == "bloch":
        if not isinstance(body, dict):
            doc.fail(key, f"{key}: bloch form needs m, a and n")
        try:
            m = int(body["m"])
            a = _real(doc, key, body["a"])
            n = [_real(doc, key, v) for v in body["n"]]
        except (KeyError, TypeError):
            doc.fail(key, f"{key}: bloch form needs m, a and n")
        if 2**m != dim:
            doc.fail(key, f"{key}: m = {m} does not match dim = {dim}")
        norm = float(np.linalg.norm(n))
        if norm == 0:
            doc.fail(key, f"{key}: direction n must be nonzero")
        try:
            return bloch_to_state(GeneralizedBlochState(m, a, np.asarray(n) / norm), dirac_gammas(m))
        except (ValueError, MedkitError) as exc:
            doc.fail(key, f"{key}: {exc}")
    doc.fail(key, f"{key}: unknown seed form {kind!r}")


def _unitaries(doc: _Doc, key: str, dim: int) -> list[np.ndarray]:
    spec = doc.get(key)
    if not isinstance(spec, dict):
        doc.fail(key, f"{key}: expected an object")
    unit = spec.get("unit", "rad")
    if unit not in ("rad", "pi"):
        doc.fail(key, f"{key}: unit must be 'rad' or 'pi'")
    scale = np.pi if unit == "pi" else 1.0
    kinds = [k for k in ("z_angles", "matrices", "spinor_thetas") if k in spec]
    if len(kinds) != 1:
        doc.fail(key, f"{key}: give exactly one of z_angles, matrices, spinor_thetas")
    kind = kinds[0]
    body = spec[kind]
    if not isinstance(body, list) or not body:
        doc.fail(key, f"{key}: {kind} must be a non-empty list")
    if kind == "z_angles":
        if dim != 2:
            doc.fail(key, f"{key}: z_angles need dim = 2")
        return [z_rotation(scale * _real(doc, key, a)) for a in body]
    if kind == "matrices":
        return [_matrix(doc, key, u, dim) for u in body]
    m = int(round(np.log2(dim)))
    if 2**m != dim:
        doc.fail(key, f"{key}: spinor_thetas need dim = 2**m")
    G = dirac_gammas(m)
    out = []
    for triples in body:
        table = {}
        for t in triples:
            if not (isinstance(t, list) and len(t) == 3):
                doc.fail(key, f"{key}: theta entries are [i, k, theta] triples")
            i, k = int(t[0]) - 1, int(t[1]) - 1
            table[(i, k)] = table.get((i, k), 0.0) + scale * _real(doc, key, t[2])
        try:
            out.append(spinor_unitary(G, table))
        except MedkitError as exc:
            doc.fail(key, f"{key}: {exc}")
    return out


def parse_ensemble(text: str, source: str = "<ensemble>") -> tuple[TwoSetEnsemble, str]:
    """Parse an ensemble document; returns the ensemble and the requested solver."""
    doc = _Doc(text, source)
    dim = doc.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        doc.fail("dim", "dim must be an integer >= 2")
    eta = _real(doc, "eta", doc.get("eta"))
    eta_p = _real(doc, "eta_prime", doc.get("eta_prime"))
    rho, rho_p = _seed(doc, "seed", dim), _seed(doc, "seed_prime", dim)
    us, us_p = _unitaries(doc, "unitaries", dim), _unitaries(doc, "unitaries_prime", dim)
    total = len(us) * eta + len(us_p) * eta_p
    if abs(total - 1.0) > 1e-12:
        doc.fail("eta", f"priors must satisfy n*eta + n'*eta' = 1; got {len(us)}*{eta!r} + "
                        f"{len(us_p)}*{eta_p!r} = {total!r}")
    try:
        e = TwoSetEnsemble(eta, eta_p, rho, rho_p, us, us_p, meta={"source": source})
    except (ValueError, MedkitError) as exc:
        doc.fail("seed", str(exc))
    solver = doc.get(SOLVER_KEY, "auto")
    if not isinstance(solver, str):
        doc.fail(SOLVER_KEY, "solver must be a string")
    return e, solver


def load_ensemble(path) -> tuple[TwoSetEnsemble, str]:
    p = Path(path)
    return parse_ensemble(p.read_text(), str(p))


def parse_povm(text: str, source: str = "<povm>") -> Povm:
    doc = _Doc(text, source)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        doc.fail("dim", "dim must be a positive integer")
    n = doc.get("n")
    els = doc.get("elements")
    if not isinstance(els, list) or not els:
        doc.fail("elements", "elements must be a non-empty list of matrices")
    if not isinstance(n, int) or not 0 <= n <= len(els):
        doc.fail("n", "n must be an integer between 0 and the number of elements")
    return Povm(np.array([_matrix(doc, "elements", m, dim) for m in els]), n)


def load_povm(path) -> Povm:
    p = Path(path)
    return parse_povm(p.read_text(), str(p))


def _fmt(z: complex) -> str:
    re_, im = float(np.real(z)), float(np.imag(z))
    return f"{re_:.17g}{im:+.17g}j"


def povm_to_json(P: Povm) -> str:
    doc = {
        "dim": P.d,
        "n": P.n,
        "elements": [[[_fmt(v) for v in row] for row in el] for el in P.elements],
    }
    return json.dumps(doc, indent=1)


def save_povm(P: Povm, path) -> None:
    Path(path).write_text(povm_to_json(P) + "\n")
