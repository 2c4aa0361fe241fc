"""JSON wire formats: complex matrices, potentials, instances, reports.

Matrices travel as row-major nested lists of [re, im] pairs.  Output is
canonical (sorted keys, fixed separators) so reports from identical runs
are byte-identical and diffable.
"""

import json
import numpy as np

from .boundary import BoundaryClassification, BoundaryPair, validate_pair
from .errors import ParseError
from .potentials import (
    Bump,
    Exponential,
    MatrixPotential,
    Sampled,
    SquareWell,
    zero_potential,
)


def complex_matrix_to_json(X: np.ndarray) -> list:
    X = np.asarray(X, dtype=complex)
    return [[[float(v.real), float(v.imag)] for v in row] for row in X]


def complex_matrix_from_json(obj, field: str) -> np.ndarray:
    try:
        rows = []
        for row in obj:
            entries = []
            for v in row:
                if isinstance(v, (int, float)):
                    entries.append(complex(v))
                else:
                    re, im = v
                    entries.append(complex(float(re), float(im)))
            rows.append(entries)
        X = np.array(rows, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"field '{field}': malformed complex matrix: {exc}") from exc
    if X.ndim != 2:
        raise ParseError(f"field '{field}': expected a 2-d matrix")
    return X


def _sig15(x: float) -> float:
    # 15 significant digits survive a JSON round trip unchanged
    return float(f"{x:.15g}")


def classification_to_json(cls: BoundaryClassification) -> dict:
    return {
        "n": cls.n,
        "thetas": [_sig15(t) for t in cls.thetas],
        "n_N": cls.n_N,
        "n_D": cls.n_D,
        "n_M": cls.n_M,
        "n_Mb": cls.n_Mb,
        "Theta": [_sig15(t) for t in cls.Theta],
        "ThetaT": [_sig15(t) for t in cls.ThetaT],
        "U": complex_matrix_to_json(cls.U),
        "M": complex_matrix_to_json(cls.M),
    }


def potential_to_json(V: MatrixPotential) -> dict:
    if isinstance(V, SquareWell):
        return {
            "kind": "square_well",
            "depth": complex_matrix_to_json(V.depth),
            "a": V.a,
            "b": V.b,
        }
    if isinstance(V, Exponential):
        return {
            "kind": "exp",
            "coefficient": complex_matrix_to_json(V.coefficient),
            "rate": V.rate,
        }
    if isinstance(V, Bump):
        return {
            "kind": "bump",
            "amplitude": complex_matrix_to_json(V.amplitude),
            "a": V.a,
            "b": V.b,
        }
    if isinstance(V, Sampled):
        return {
            "kind": "sampled",
            "xs": [float(x) for x in V.xs],
            "vs": [complex_matrix_to_json(v) for v in V.vs],
        }
    raise ParseError(f"potential kind '{V.kind}' has no JSON form")


def potential_from_json(obj, n: int) -> MatrixPotential:
    if not isinstance(obj, dict):
        raise ParseError("field 'potential': expected an object")
    kind = obj.get("kind")
    try:
        if kind == "square_well":
            return SquareWell(
                depth=complex_matrix_from_json(obj["depth"], "potential.depth"),
                a=float(obj["a"]),
                b=float(obj["b"]),
            )
        if kind == "exp":
            return Exponential(
                coefficient=complex_matrix_from_json(
                    obj["coefficient"], "potential.coefficient"
                ),
                rate=float(obj["rate"]),
            )
        if kind == "bump":
            return Bump(
                amplitude=complex_matrix_from_json(
                    obj["amplitude"], "potential.amplitude"
                ),
                a=float(obj["a"]),
                b=float(obj["b"]),
            )
        if kind == "sampled":
            vs = [
                complex_matrix_from_json(v, f"potential.vs[{i}]")
                for i, v in enumerate(obj["vs"])
            ]
            return Sampled(xs=np.asarray(obj["xs"], dtype=float), vs=np.array(vs))
    except KeyError as exc:
        raise ParseError(f"field 'potential': missing key {exc}") from exc
    raise ParseError(f"field 'potential.kind': unknown kind {kind!r}")


class Instance:
    """A boundary pair plus potential plus solver options."""

    def __init__(self, pair: BoundaryPair, potential: MatrixPotential,
                 options: dict | None = None, default_potential: bool = False):
        self.pair = pair
        self.potential = potential
        self.options = dict(options or {})
        self.default_potential = default_potential

    def to_json(self) -> dict:
        return {
            "pair": {
                "A": complex_matrix_to_json(self.pair.A),
                "B": complex_matrix_to_json(self.pair.B),
            },
            "potential": potential_to_json(self.potential),
            "options": self.options,
        }


def instance_from_json(obj) -> Instance:
    if not isinstance(obj, dict):
        raise ParseError("top level: expected an object")
    if "pair" not in obj:
        raise ParseError("field 'pair': missing")
    pair_obj = obj["pair"]
    if not isinstance(pair_obj, dict) or "A" not in pair_obj or "B" not in pair_obj:
        raise ParseError("field 'pair': must contain matrices 'A' and 'B'")
    A = complex_matrix_from_json(pair_obj["A"], "pair.A")
    B = complex_matrix_from_json(pair_obj["B"], "pair.B")
    pair = validate_pair(A, B)
    default_potential = "potential" not in obj or obj["potential"] is None
    if default_potential:
        potential = zero_potential(pair.n)
    else:
        potential = potential_from_json(obj["potential"], pair.n)
    if potential.n != pair.n:
        raise ParseError(
            f"field 'potential': dimension {potential.n} != pair dimension {pair.n}"
        )
    options = obj.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("field 'options': expected an object")
    return Instance(pair, potential, options, default_potential=default_potential)


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    return instance_from_json(obj)


def canonical_json(obj) -> str:
    """Deterministic rendering used for all emitted reports."""
    return json.dumps(obj, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def emit_report(report: dict, path=None) -> str:
    text = canonical_json(report)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text
