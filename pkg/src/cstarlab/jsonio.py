"""JSON encoding of matrices, problem fixtures and result reports.

Complex numbers travel as ``[re, im]`` pairs of doubles; a matrix is
``{"rows": m, "cols": n, "entries": [[re, im], ...]}`` with entries in
row-major order.  Fixtures carry a ``kind`` tag (``algebra``, ``tro`` or
``ideal``) plus generator lists and optional ground truth.  Reports are
dumped with sorted keys and no volatile fields, so identical runs
produce byte-identical output.
"""

import json
import numpy as np

from .errors import ParseError

__all__ = [
    "encode_matrix",
    "decode_matrix",
    "encode_fixture",
    "decode_fixture",
    "dumps_report",
]


def encode_matrix(m):
    m = np.asarray(m, dtype=np.complex128)
    return {
        "rows": int(m.shape[0]),
        "cols": int(m.shape[1]),
        "entries": [[float(z.real), float(z.imag)] for z in m.ravel()],
    }


def decode_matrix(obj):
    try:
        rows, cols = int(obj["rows"]), int(obj["cols"])
        entries = obj["entries"]
        if len(entries) != rows * cols:
            raise ParseError(
                f"matrix entry count {len(entries)} != rows*cols = {rows * cols}"
            )
        flat = np.array(
            [complex(float(re), float(im)) for re, im in entries],
            dtype=np.complex128,
        )
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed matrix object: {exc}") from exc
    return flat.reshape(rows, cols)


def encode_algebra_fixture(ambient_dim, generators, ground_truth=None):
    out = {
        "kind": "algebra",
        "ambient": int(ambient_dim),
        "generators": [encode_matrix(g) for g in generators],
    }
    if ground_truth is not None:
        out["ground_truth"] = {
            "block_sizes": [int(n) for n in ground_truth[0]],
            "multiplicities": [int(m) for m in ground_truth[1]],
        }
    return out


def encode_tro_fixture(rows, cols, generators, ground_truth=None):
    out = {
        "kind": "tro",
        "ambient": [int(rows), int(cols)],
        "generators": [encode_matrix(g) for g in generators],
    }
    if ground_truth is not None:
        out["ground_truth"] = {"blocks": [[int(m), int(n)] for m, n in ground_truth]}
    return out


def encode_ideal_fixture(ambient_dim, algebra_generators, ideal_generators):
    return {
        "kind": "ideal",
        "ambient": int(ambient_dim),
        "algebra_generators": [encode_matrix(g) for g in algebra_generators],
        "ideal_generators": [encode_matrix(g) for g in ideal_generators],
    }


def encode_fixture(kind, **kw):
    if kind == "algebra":
        return encode_algebra_fixture(**kw)
    if kind == "tro":
        return encode_tro_fixture(**kw)
    if kind == "ideal":
        return encode_ideal_fixture(**kw)
    raise ParseError(f"unknown fixture kind {kind!r}")


def decode_fixture(obj):
    """Validate and normalize a fixture dict into plain python + arrays.

    Returns a dict with the same keys but matrices decoded; raises
    :class:`ParseError` on anything malformed.
    """
    if not isinstance(obj, dict):
        raise ParseError("fixture must be a JSON object")
    kind = obj.get("kind")
    try:
        if kind == "algebra":
            n = int(obj["ambient"])
            out = {
                "kind": kind,
                "ambient": n,
                "generators": [decode_matrix(g) for g in obj["generators"]],
            }
            gt = obj.get("ground_truth")
            if gt is not None:
                out["ground_truth"] = (
                    [int(x) for x in gt["block_sizes"]],
                    [int(x) for x in gt["multiplicities"]],
                )
            return out
        if kind == "tro":
            rows, cols = (int(x) for x in obj["ambient"])
            out = {
                "kind": kind,
                "ambient": (rows, cols),
                "generators": [decode_matrix(g) for g in obj["generators"]],
            }
            gt = obj.get("ground_truth")
            if gt is not None:
                out["ground_truth"] = [(int(m), int(n)) for m, n in gt["blocks"]]
            return out
        if kind == "ideal":
            n = int(obj["ambient"])
            return {
                "kind": kind,
                "ambient": n,
                "algebra_generators": [
                    decode_matrix(g) for g in obj["algebra_generators"]
                ],
                "ideal_generators": [decode_matrix(g) for g in obj["ideal_generators"]],
            }
    except ParseError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind!r} fixture: {exc}") from exc
    raise ParseError(f"unknown fixture kind {kind!r}")


def _plain(value):
    """Recursively convert numpy scalars/arrays to JSON-safe python."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.ndarray):
        if value.ndim == 2:
            return encode_matrix(value)
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, complex):
        return [float(value.real), float(value.imag)]
    return value


def dumps_report(report):
    """Deterministic JSON text for a report dict (sorted keys, trailing
    newline, no timestamps or other volatile content)."""
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def certificate_report(cert):
    """JSON-ready view of a :class:`ProjectionCertificate`."""
    return {
        "projection": encode_matrix(cert.projection),
        "generator_count": cert.generator_count,
        "coefficient_bound": cert.coefficient_bound,
        "threshold": cert.threshold,
        "min_positive_eigenvalue": cert.min_positive_eigenvalue,
        "spectrum": [float(x) for x in np.asarray(cert.spectrum).ravel()],
        "cut": cert.cut,
        "solve_residual": cert.solve_residual,
        "residuals": {k: float(v) for k, v in cert.residuals.items()},
        "trivial": bool(cert.is_trivial),
    }
